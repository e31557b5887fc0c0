#pragma once

// Potential theory on homogeneous trees at desk scale: Poisson kernels and
// their eigenvalue derivatives, boundary measures, polyharmonic synthesis,
// the shifted Laplacian with its norm-preserving right inverse, the finite
// heat semigroup, and the cross-validation suites.

#include "treeharm/errors.hpp"
#include "treeharm/io.hpp"
#include "treeharm/jet.hpp"
#include "treeharm/kernels.hpp"
#include "treeharm/measures.hpp"
#include "treeharm/polyharmonic.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"
#include "treeharm/verify.hpp"
