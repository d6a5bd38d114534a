// Cross-correlation ranging with the basis-matched sequences
//   T1 = (1 - B) X_T + B P_T,   T2 = B X_T - (1 - B) P_T,
// peak detection against a noise-floor threshold, and phase-drift recovery.

#pragma once

#include "qlidar/core.hpp"
#include "qlidar/optics.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qlidar {

struct ConstructedSequences {
    std::vector<double> t1;
    std::vector<double> t2;
};

/// `bits` are the basis bits of the receive slots paired with each frame
/// index; its length must match the frame.
ConstructedSequences build_sequences(const TransmitFrame& frame,
                                     std::span<const std::uint8_t> bits);

struct CorrelationProfile {
    // Lag d pairs frame sample i with receive slot i + d; lags run 0..size()-1.
    std::vector<double> c1;
    std::vector<double> c2;
    std::size_t ranging_length = 0;
    double c_max = 0.0;
    std::size_t peak_lag = 0;
    double mu1_hat = 0.0;  // direction estimates of cos(delta), sin(delta)
    double mu2_hat = 0.0;

    std::size_t size() const noexcept { return c1.size(); }
};

enum class CorrelationMethod { fft, direct };

class InsufficientOverlap : public std::length_error {
public:
    using std::length_error::length_error;
};

/// C_nu(d) = (1/L) sum_{i<L} T_nu,i(d) R_{i+d}, where T_nu is built from the
/// first L frame samples and the basis bits of slots i + d. Only lags with a
/// full L-sample overlap are evaluated. Ties in |C| go to the smaller lag.
CorrelationProfile moving_cross_correlation(const TransmitFrame& frame,
                                            const ReceiveFrame& receive, std::size_t ranging_length,
                                            CorrelationMethod method = CorrelationMethod::fft);

/// (C_1(lag), C_2(lag)) by direct summation over `length` samples.
std::pair<double, double> correlate_at_lag(const TransmitFrame& frame,
                                           const ReceiveFrame& receive, std::size_t length,
                                           std::size_t lag);

/// V_C^nf = (eta V_M^2 / L)(1 + 1/SNR) = V_M (eta V_M + V_N) / L.
double noise_floor_variance(double eta, double modulation_variance, double noise_var,
                            std::size_t length);

/// V_C^p = (eta V_M^2 / L) mu^2 + V_C^nf.
double peak_variance(double eta, double modulation_variance, double noise_var,
                     std::size_t length, double mu);

/// Honest-scenario V_C^nf for the config's L.
double analytic_noise_floor(const ProtocolConfig& config);

/// Noise floor from the profile itself: median of C^2 over every off-peak lag
/// of both sequences, divided by the chi-square(1) median.
double empirical_noise_floor(const CorrelationProfile& profile);

enum class NoiseFloorSource { empirical, analytic };

struct RangingVerdict {
    bool detected = false;
    std::size_t estimated_delay = 0;
    double threshold_used = 0.0;
    double noise_floor = 0.0;     // V_C^nf behind the threshold
    double phase_estimate = 0.0;  // NaN when the peak carries no phase
};

/// C_th = k sqrt(V_C^nf); detected iff c_max >= C_th and c_max > 0.
RangingVerdict detect_target(const CorrelationProfile& profile, const ProtocolConfig& config,
                             NoiseFloorSource source = NoiseFloorSource::empirical);

class UndefinedPhase : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Four-quadrant drift estimate atan2(c2, c1).
double estimate_phase(double c1_peak, double c2_peak);

/// Rotates (X_T, P_T) by delta_hat; basis bits are carried over unchanged.
TransmitFrame compensate_phase(const TransmitFrame& frame, double delta_hat);

}  // namespace qlidar
