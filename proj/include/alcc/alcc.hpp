#pragma once

// Umbrella header for the alcc library: inexact augmented Lagrangian solver
// for conic convex programs with an accelerated proximal gradient inner loop.

#include "alcc/common.hpp"
#include "alcc/cones.hpp"
#include "alcc/errors.hpp"
#include "alcc/linalg.hpp"
#include "alcc/problems.hpp"
#include "alcc/simple_sets.hpp"
#include "alcc/solver.hpp"
#include "alcc/apg.hpp"
