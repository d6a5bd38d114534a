// Quadrature-level simulation of Gaussian-modulated coherent-state frames,
// the honest round trip, the intercept-resend spoofer, and randomized
// homodyne detection.

#pragma once

#include "qlidar/core.hpp"
#include "qlidar/random.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qlidar {

struct TransmitFrame {
    std::vector<double> x;              // X_T, length M
    std::vector<double> p;              // P_T, length M
    std::vector<std::uint8_t> basis;    // B, length M'; 0 -> measure X, 1 -> measure P

    std::size_t size() const noexcept { return x.size(); }
};

/// Per-sample decomposition of one homodyne outcome. Vacuum terms are X_0,
/// X_1, X_2 (honest) or X_0, X_3, X_4, X_5, X_6 (spoofed), each already scaled
/// and projected onto the measured quadrature.
struct NoiseBreakdown {
    double signal = 0.0;
    std::array<double, 5> vacuum{};
    std::size_t vacuum_count = 0;
    double excess = 0.0;
    double detector = 0.0;

    double total() const noexcept;
};

struct ReceiveFrame {
    std::vector<double> measurements;     // R, length M'
    Scenario scenario = Scenario::honest;
    std::size_t true_delay = 0;           // ground truth; never read by the receiver
    std::vector<NoiseBreakdown> breakdown;  // filled in term_by_term mode only
};

enum class ChannelMode {
    aggregate,     // signal plus one Gaussian of the total noise variance
    term_by_term,  // every physical noise source drawn separately
};

class WindowOverflow : public std::length_error {
public:
    using std::length_error::length_error;
};

/// X_T = A cos(theta), P_T = A sin(theta) with theta ~ U[0, 2pi) and A
/// Rayleigh with scale sqrt(V_M); basis bits are fair coins over M'.
TransmitFrame modulate(const ProtocolConfig& config, RandomStream& stream);

ReceiveFrame honest_roundtrip(const TransmitFrame& frame, const ProtocolConfig& config,
                              RandomStream& stream,
                              ChannelMode mode = ChannelMode::aggregate);

ReceiveFrame spoof_roundtrip(const TransmitFrame& frame, const ProtocolConfig& config,
                             RandomStream& stream,
                             ChannelMode mode = ChannelMode::term_by_term);

ReceiveFrame roundtrip(Scenario scenario, const TransmitFrame& frame,
                       const ProtocolConfig& config, RandomStream& stream, ChannelMode mode);

/// SNR_a = eta_a V_M / V_Na or SNR_p = eta_p V_M / V_Np.
double snr_analytic(const ProtocolConfig& config, Scenario scenario);

}  // namespace qlidar
