#pragma once

// Negative multinomial counts, their matched Gaussian local approximation,
// correction-term expansions, moment oracles, Hellinger/total-variation
// estimators, and transport-kernel deficiency experiments.

#include "nmgauss/divergence.hpp"
#include "nmgauss/errors.hpp"
#include "nmgauss/expansion.hpp"
#include "nmgauss/gaussian.hpp"
#include "nmgauss/lecam.hpp"
#include "nmgauss/linalg.hpp"
#include "nmgauss/model.hpp"
#include "nmgauss/moments.hpp"
#include "nmgauss/parallel.hpp"
#include "nmgauss/pmf.hpp"
#include "nmgauss/quadrature.hpp"
#include "nmgauss/ratefit.hpp"
#include "nmgauss/rng.hpp"
#include "nmgauss/sampling.hpp"
