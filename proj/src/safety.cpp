#include "rcmdp/deployment.hpp"

#include <cmath>
#include <stdexcept>

namespace rcmdp::deploy {
namespace {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

SafetyFunction SafetyFunction::with_defaults(double t_min, double t_max) {
    return SafetyFunction{t_min, t_max, 0.5 * (t_min + t_max), (t_max - t_min) / 8.0};
}

double eval_safety(const SafetyFunction& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("eval_safety: time must be >= 0");
    if (!(f.steepness > 0.0)) throw std::invalid_argument("eval_safety: steepness must be > 0");
    if (t == 0.0) return 0.0;
    const double z0 = -f.midpoint / f.steepness;
    const double base = logistic(z0);
    // 1 - sigma(z0) == sigma(-z0), computed without cancellation.
    const double value = (logistic((t - f.midpoint) / f.steepness) - base) / logistic(-z0);
    if (value < 0.0) return 0.0;
    return value > 1.0 ? 1.0 : value;
}

SafetyFunction Edge::safety() const {
    SafetyFunction f = SafetyFunction::with_defaults(t_min, t_max);
    if (midpoint) f.midpoint = *midpoint;
    if (steepness) f.steepness = *steepness;
    return f;
}

}  // namespace rcmdp::deploy
