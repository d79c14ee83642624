#include "rsbr/canonical.hpp"

namespace rsbr::canonical {

Scenario s1() {
    return {BaselineHazard::constant(0.01), IntensityModel::constant(2.0), ServiceTimeModel::exponential(1.0),
            StressDistribution::degenerate(0.05), 1.0};
}

Scenario s2() {
    return {BaselineHazard::weibull(1.5, 30.0), IntensityModel::sinusoidal(2.0, 1.5, 10.0),
            ServiceTimeModel::exponential(1.0), StressDistribution{{{0.01, 0.5}, {0.05, 0.3}, {0.2, 0.2}}}, 1.0};
}

Scenario s3() {
    return {BaselineHazard::constant(0.02), IntensityModel::constant(1.5),
            ServiceTimeModel{ServiceTimeModel::Lognormal{-0.5, 0.8}},
            StressDistribution{{{0.0, 0.2}, {0.03, 0.5}, {0.1, 0.3}}}, 1.0};
}

Scenario s4() {
    return {BaselineHazard::weibull(2.0, 25.0),
            IntensityModel{IntensityModel::PiecewiseLinear{{{0.0, 0.5}, {5.0, 3.0}, {10.0, 1.0}, {20.0, 2.0}}}},
            ServiceTimeModel{ServiceTimeModel::Weibull{1.5, 1.2}}, StressDistribution{{{0.02, 0.6}, {0.08, 0.4}}},
            1.0};
}

Scenario s5() {
    return {BaselineHazard{BaselineHazard::PiecewiseConstant{{5.0, 12.0}, {0.005, 0.02, 0.01}}},
            IntensityModel::sinusoidal(3.0, 3.0, 7.0), ServiceTimeModel{ServiceTimeModel::Deterministic{0.7}},
            StressDistribution{{{0.01, 0.3}, {0.04, 0.4}, {0.12, 0.3}}}, 1.0};
}

std::vector<std::string> names() { return {"s1", "s2", "s3", "s4", "s5"}; }

std::optional<Scenario> by_name(const std::string& name) {
    if (name == "s1") return s1();
    if (name == "s2") return s2();
    if (name == "s3") return s3();
    if (name == "s4") return s4();
    if (name == "s5") return s5();
    return std::nullopt;
}

}  // namespace rsbr::canonical
