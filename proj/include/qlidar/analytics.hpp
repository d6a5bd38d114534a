// Closed-form detection-theory helpers shared by ranging and estimation.

#pragma once

#include <stdexcept>

namespace qlidar {

/// Complementary error function, (2/sqrt(pi)) * integral_x^inf exp(-z^2) dz.
double erfc(double x);

/// P(Y >= threshold) for Y ~ N(mean, variance), i.e. 0.5 erfc((th - mean) / sqrt(2 var)).
/// A zero variance degenerates to a step at the mean.
double exceedance_probability(double threshold, double mean, double variance);

class UnattainableTarget : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Threshold th with exceedance_probability(th, mean, variance) == p_target,
/// found by bracketed bisection on the monotone tail. Requires p_target in
/// (0, 1) and variance > 0.
double invert_threshold(double p_target, double mean, double variance);

}  // namespace qlidar
