#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsbr/model.hpp"

namespace rsbr::canonical {

/// r_0 = 0.01, lambda = 2, W ~ Exponential(1), H = 0.05, nu = 1.
Scenario s1();
/// Weibull baseline, sinusoidal intensity, exponential service, 3-atom stress.
Scenario s2();
/// Constant baseline and intensity, lognormal service, 3-atom stress.
Scenario s3();
/// Weibull baseline, piecewise-linear intensity, Weibull service, 2-atom stress.
Scenario s4();
/// Piecewise-constant baseline, sinusoidal intensity, deterministic service,
/// 3-atom stress.
Scenario s5();

/// Names accepted by `by_name`: "s1" .. "s5".
std::vector<std::string> names();
std::optional<Scenario> by_name(const std::string& name);

}  // namespace rsbr::canonical
