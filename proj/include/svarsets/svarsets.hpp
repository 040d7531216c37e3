#pragma once

// Umbrella header: frequentist confidence bands and plug-in identified-set
// estimates for sign-restricted structural VARs, plus a Bayesian
// comparison sampler and a Monte Carlo harness.

#include "svarsets/bayes.hpp"
#include "svarsets/bootstrap.hpp"
#include "svarsets/common.hpp"
#include "svarsets/confidence_sets.hpp"
#include "svarsets/io.hpp"
#include "svarsets/mc.hpp"
#include "svarsets/moment_inequality.hpp"
#include "svarsets/nnls.hpp"
#include "svarsets/parallel.hpp"
#include "svarsets/restrictions.hpp"
#include "svarsets/rng.hpp"
#include "svarsets/sphere.hpp"
#include "svarsets/stats.hpp"
#include "svarsets/var.hpp"

namespace svarsets {
inline constexpr const char* version = "1.0.0";
}
