#include "qlidar/analytics.hpp"

#include <cmath>
#include <string>

namespace qlidar {

double erfc(double x) { return std::erfc(x); }

double exceedance_probability(double threshold, double mean, double variance) {
    if (variance <= 0.0) return threshold <= mean ? 1.0 : 0.0;
    return 0.5 * erfc((threshold - mean) / std::sqrt(2.0 * variance));
}

double invert_threshold(double p_target, double mean, double variance) {
    if (!(p_target > 0.0 && p_target < 1.0))
        throw UnattainableTarget("target probability " + std::to_string(p_target) +
                                 " outside (0, 1)");
    if (!(variance > 0.0)) throw UnattainableTarget("variance must be positive");

    // Work in standardized units; the tail is decreasing in z.
    const auto tail = [](double z) { return 0.5 * erfc(z / std::sqrt(2.0)); };
    double lo = -1.0;
    double hi = 1.0;
    while (tail(lo) < p_target) lo *= 2.0;
    while (tail(hi) > p_target) {
        hi *= 2.0;
        if (hi > 1e3) throw UnattainableTarget("target probability below double range");
    }
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (tail(mid) > p_target)
            lo = mid;
        else
            hi = mid;
    }
    const double z = std::abs(tail(lo) - p_target) <= std::abs(tail(hi) - p_target) ? lo : hi;
    return mean + z * std::sqrt(variance);
}

}  // namespace qlidar
