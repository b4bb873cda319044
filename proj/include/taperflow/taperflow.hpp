#pragma once

#include "taperflow/coefficients.hpp"
#include "taperflow/errors.hpp"
#include "taperflow/fft.hpp"
#include "taperflow/filters.hpp"
#include "taperflow/gaussian_limits.hpp"
#include "taperflow/innovations.hpp"
#include "taperflow/limit_theory.hpp"
#include "taperflow/linalg.hpp"
#include "taperflow/montecarlo.hpp"
#include "taperflow/path_engine.hpp"
#include "taperflow/quadrature.hpp"
#include "taperflow/rng.hpp"
#include "taperflow/special.hpp"
#include "taperflow/stats.hpp"
#include "taperflow/summation.hpp"
#include "taperflow/version.hpp"
