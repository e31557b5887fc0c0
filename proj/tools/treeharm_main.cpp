// Command-line front end: spectral queries, ball evaluation, orbits, the
// right inverse, coefficient matrices, and the verification suites.
// Exit codes: 0 ok, 2 usage/parse problem, 3 numeric or precondition failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "treeharm/treeharm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw treeharm::parse_error("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw treeharm::parse_error("cannot open output file '" + path + "'");
    out << text;
}

struct ParamArgs {
    int q = 2;
    std::string z_str;
    std::string lambda_str;

    void attach(CLI::App* cmd, bool need_q = true) {
        if (need_q) cmd->add_option("--q", q, "tree degree (every vertex has q+1 neighbors)");
        cmd->add_option("--z", z_str, "branch parameter, complex literal like 1.5+0.3i");
        cmd->add_option("--lambda", lambda_str, "eigenvalue, complex literal like 1.2");
    }

    bool has_z() const { return !z_str.empty(); }
    bool has_lambda() const { return !lambda_str.empty(); }

    void require_exactly_one() const {
        if (has_z() == has_lambda())
            throw treeharm::parse_error("give exactly one of --z or --lambda");
    }

    treeharm::EigenParam eigen_param() const {
        require_exactly_one();
        const treeharm::Degree d(q);
        if (has_z()) return treeharm::EigenParam::from_z(d, treeharm::parse_complex_literal(z_str));
        return treeharm::EigenParam::from_lambda(d, treeharm::parse_complex_literal(lambda_str));
    }
};

treeharm::ParsedPolyFunction load_function(const std::string& path) {
    treeharm::Json j;
    try {
        j = treeharm::Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw treeharm::parse_error("'" + path + "': " + e.what());
    }
    const auto parsed = treeharm::poly_function_from_json(j);
    if (parsed.order_demoted)
        std::cerr << "warning: top " << parsed.dropped_coordinates
                  << " coordinate(s) numerically zero; order demoted to "
                  << treeharm::order(parsed.fn) << "\n";
    return parsed;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

int cmd_gamma(const ParamArgs& pa) {
    using namespace treeharm;
    pa.require_exactly_one();
    const Degree d(pa.q);
    Complex z, lambda;
    if (pa.has_z()) {
        z = parse_complex_literal(pa.z_str);
        lambda = gamma(z, d);
        if (z.real() < 0.5) z = Complex(1.0) - z; // principal representative, same eigenvalue
    } else {
        lambda = parse_complex_literal(pa.lambda_str);
        z = z_from_lambda(lambda, d); // throws on the spectrum
    }
    Json out{{"q", d.q()},
             {"z", complex_to_json(z)},
             {"lambda", complex_to_json(lambda)},
             {"rho", spectral_radius(d)},
             {"in_spectrum", in_l2_spectrum(lambda, d)}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& input, int radius, const std::string& out_path) {
    using namespace treeharm;
    const auto parsed = load_function(input);
    emit(ball_values_csv(evaluate_ball(parsed.fn, radius)), out_path);
    return kExitOk;
}

int cmd_orbit(const std::string& input, double t, int steps, const std::string& op_name,
              const std::string& out_path) {
    using namespace treeharm;
    OrbitOperator op;
    if (op_name == "heat")
        op = OrbitOperator::heat;
    else if (op_name == "shifted-laplacian")
        op = OrbitOperator::shifted_laplacian;
    else
        throw parse_error("unknown operator '" + op_name + "' (heat | shifted-laplacian)");
    const auto parsed = load_function(input);
    emit(orbit_csv(orbit(parsed.fn, t, steps, op), op), out_path);
    return kExitOk;
}

int cmd_right_inverse(const std::string& input, const std::string& out_path) {
    using namespace treeharm;
    const auto parsed = load_function(input);
    const PolyFunction fh = right_inverse(parsed.fn);
    write_file(out_path, poly_function_to_json(fh).dump(2) + "\n");
    Json info{{"input_order", order(parsed.fn)},
              {"output_order", order(fh)},
              {"input_norm", poly_norm(parsed.fn)},
              {"output_norm", poly_norm(fh)}};
    std::cout << info.dump(2) << "\n";
    return kExitOk;
}

int cmd_coeffs(const ParamArgs& pa, int n, const std::string& out_path) {
    using namespace treeharm;
    const CoeffMatrix m = coeff_matrix(pa.eigen_param(), n);
    emit(coeff_matrix_to_json(m).dump(2) + "\n", out_path);
    return kExitOk;
}

int cmd_verify(const std::string& suite, const ParamArgs& pa,
               const std::vector<std::string>& z_strs, const std::vector<std::string>& la_strs,
               int radius, std::uint64_t seed, double tol_exact, double tol_rel, double tol_fd,
               const std::string& out_path) {
    using namespace treeharm;
    SuiteConfig cfg;
    cfg.q = pa.q;
    cfg.radius = radius;
    cfg.seed = seed;
    cfg.tol_exact = tol_exact;
    cfg.tol_rel = tol_rel;
    cfg.tol_fd = tol_fd;
    for (const auto& s : z_strs) cfg.z_list.push_back(parse_complex_literal(s));
    for (const auto& s : la_strs) cfg.lambda_list.push_back(parse_complex_literal(s));
    const SuiteReport rep = run_suite(suite, cfg);
    std::cout << report_table(rep);
    if (!out_path.empty()) write_file(out_path, report_to_json(rep).dump(2) + "\n");
    return rep.passed() ? kExitOk : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"potential theory on homogeneous trees: kernels, polyharmonic functions, heat orbits"};
    app.require_subcommand(1);

    ParamArgs gamma_args;
    auto* gamma_cmd = app.add_subcommand("gamma", "eigenvalue map: lambda, principal z, rho, spectrum flag");
    gamma_args.attach(gamma_cmd);

    std::string eval_input, eval_out;
    int eval_radius = 4;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a polyharmonic function on a ball (CSV)");
    eval_cmd->add_option("--input", eval_input, "PolyFunction JSON file")->required();
    eval_cmd->add_option("--radius", eval_radius, "ball radius");
    eval_cmd->add_option("--out", eval_out, "output CSV path (stdout if omitted)");

    std::string orbit_input, orbit_out, orbit_op = "heat";
    double orbit_t = 0.0;
    int orbit_steps = 1;
    auto* orbit_cmd = app.add_subcommand("orbit", "norms along operator orbits (CSV)");
    orbit_cmd->add_option("--input", orbit_input, "PolyFunction JSON file")->required();
    orbit_cmd->add_option("--t", orbit_t, "heat time per step (t != 0)");
    orbit_cmd->add_option("--steps", orbit_steps, "number of steps")->required();
    orbit_cmd->add_option("--operator", orbit_op, "heat | shifted-laplacian");
    orbit_cmd->add_option("--out", orbit_out, "output CSV path (stdout if omitted)");

    std::string ri_input, ri_out;
    auto* ri_cmd = app.add_subcommand("right-inverse", "norm-preserving right inverse of P - lambda I");
    ri_cmd->add_option("--input", ri_input, "PolyFunction JSON file")->required();
    ri_cmd->add_option("--out", ri_out, "output PolyFunction JSON path")->required();

    ParamArgs coeffs_args;
    int coeffs_n = 4;
    std::string coeffs_out;
    auto* coeffs_cmd = app.add_subcommand("coeffs", "coefficient matrix a_{k,r}(lambda) (JSON)");
    coeffs_args.attach(coeffs_cmd);
    coeffs_cmd->add_option("--order", coeffs_n, "matrix order n (entries up to r = n-1)");
    coeffs_cmd->add_option("--out", coeffs_out, "output JSON path (stdout if omitted)");

    std::string verify_suite, verify_out;
    ParamArgs verify_args;
    std::vector<std::string> verify_z, verify_lambda;
    int verify_radius = 6;
    std::uint64_t verify_seed = 1;
    double tol_exact = 1e-12, tol_rel = 1e-9, tol_fd = 1e-5;
    auto* verify_cmd = app.add_subcommand("verify", "run a cross-validation suite");
    verify_cmd->add_option("suite", verify_suite,
                           "identities | representations | norms | semigroup | bounds")
        ->required();
    verify_cmd->add_option("--q", verify_args.q, "tree degree");
    verify_cmd->add_option("--z", verify_z, "extra branch parameters (repeatable)");
    verify_cmd->add_option("--lambda", verify_lambda, "extra eigenvalues (repeatable)");
    verify_cmd->add_option("--radius", verify_radius, "ball radius for stencil checks");
    verify_cmd->add_option("--seed", verify_seed, "random seed");
    verify_cmd->add_option("--tol-exact", tol_exact, "tolerance for exact coordinate identities");
    verify_cmd->add_option("--tol-rel", tol_rel, "tolerance for jet-vs-stencil comparisons");
    verify_cmd->add_option("--tol-fd", tol_fd, "tolerance for finite-difference oracles");
    verify_cmd->add_option("--out", verify_out, "write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (gamma_cmd->parsed()) return cmd_gamma(gamma_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_input, eval_radius, eval_out);
        if (orbit_cmd->parsed()) return cmd_orbit(orbit_input, orbit_t, orbit_steps, orbit_op, orbit_out);
        if (ri_cmd->parsed()) return cmd_right_inverse(ri_input, ri_out);
        if (coeffs_cmd->parsed()) return cmd_coeffs(coeffs_args, coeffs_n, coeffs_out);
        if (verify_cmd->parsed())
            return cmd_verify(verify_suite, verify_args, verify_z, verify_lambda, verify_radius,
                              verify_seed, tol_exact, tol_rel, tol_fd, verify_out);
    } catch (const treeharm::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const treeharm::suite_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const treeharm::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
