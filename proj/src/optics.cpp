#include "qlidar/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qlidar {

double NoiseBreakdown::total() const noexcept {
    double sum = signal;
    for (std::size_t k = 0; k < vacuum_count; ++k) sum += vacuum[k];
    return sum + excess + detector;
}

TransmitFrame modulate(const ProtocolConfig& config, RandomStream& stream) {
    validate_config(config);
    const std::size_t m = config.frame_length;
    const double scale = std::sqrt(config.modulation_variance);

    TransmitFrame frame;
    frame.x.resize(m);
    frame.p.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        // 1 - u lies in (0, 1], so the log is finite.
        const double u = stream.uniform();
        const double amplitude = scale * std::sqrt(-2.0 * std::log1p(-std::min(u, 1.0 - 0x1p-53)));
        const double theta = 2.0 * std::numbers::pi * stream.uniform();
        frame.x[i] = amplitude * std::cos(theta);
        frame.p[i] = amplitude * std::sin(theta);
    }
    frame.basis.resize(config.receive_window_length);
    for (auto& b : frame.basis) b = stream.bit() ? 1 : 0;
    return frame;
}

namespace {

struct Rotation {
    double c;
    double s;

    // Projection of a rotated field (fx, fp) onto the quadrature picked by bit.
    double project(double fx, double fp, std::uint8_t bit) const noexcept {
        return bit == 0 ? fx * c - fp * s : fx * s + fp * c;
    }
};

void check_geometry(const TransmitFrame& frame, const ProtocolConfig& config) {
    if (frame.p.size() != frame.x.size())
        throw std::invalid_argument("transmit frame quadratures differ in length");
    if (frame.basis.size() != config.receive_window_length)
        throw std::invalid_argument("basis sequence length " + std::to_string(frame.basis.size()) +
                                    " != receive_window_length " +
                                    std::to_string(config.receive_window_length));
    if (config.true_delay + frame.size() > config.receive_window_length)
        throw WindowOverflow("true_delay + frame length " +
                             std::to_string(config.true_delay + frame.size()) +
                             " exceeds receive window " +
                             std::to_string(config.receive_window_length));
}

// Transmitted quadratures seen at receive slot j; zero outside the echo span.
struct SlotSignal {
    double x = 0.0;
    double p = 0.0;
};

SlotSignal slot_signal(const TransmitFrame& frame, std::size_t delay, std::size_t j) {
    if (j < delay || j - delay >= frame.size()) return {};
    return {frame.x[j - delay], frame.p[j - delay]};
}

ReceiveFrame aggregate_roundtrip(const TransmitFrame& frame, const ProtocolConfig& config,
                                 RandomStream& stream, Scenario scenario) {
    const auto channel = linear_channel(config, scenario);
    const Rotation rot{std::cos(config.phase_drift), std::sin(config.phase_drift)};
    const double gain = std::sqrt(channel.eta);
    const double sigma = std::sqrt(channel.noise_var);

    ReceiveFrame out;
    out.scenario = scenario;
    out.true_delay = config.true_delay;
    out.measurements.resize(config.receive_window_length);
    for (std::size_t j = 0; j < out.measurements.size(); ++j) {
        const auto t = slot_signal(frame, config.true_delay, j);
        out.measurements[j] = gain * rot.project(t.x, t.p, frame.basis[j]) + sigma * stream.normal();
    }
    return out;
}

ReceiveFrame honest_terms(const TransmitFrame& frame, const ProtocolConfig& config,
                          RandomStream& stream) {
    const double t = config.channel_transmittance * config.channel_transmittance *
                     config.target_reflectivity;
    const double eta_d = config.detector_efficiency;
    const double s_in = std::sqrt(eta_d * t);
    const double s_loss = std::sqrt(eta_d * (1.0 - t));
    const double s_det = std::sqrt(1.0 - eta_d);
    const double s_exc = std::sqrt(config.excess_noise);
    const double s_vd = std::sqrt(config.detector_noise);
    const Rotation rot{std::cos(config.phase_drift), std::sin(config.phase_drift)};

    ReceiveFrame out;
    out.scenario = Scenario::honest;
    out.true_delay = config.true_delay;
    out.measurements.resize(config.receive_window_length);
    out.breakdown.resize(config.receive_window_length);
    for (std::size_t j = 0; j < out.measurements.size(); ++j) {
        const auto sig = slot_signal(frame, config.true_delay, j);
        const std::uint8_t bit = frame.basis[j];
        const double x0x = stream.normal(), x0p = stream.normal();
        const double xex = s_exc * stream.normal(), xep = s_exc * stream.normal();
        const double x1x = stream.normal(), x1p = stream.normal();
        const double x2 = stream.normal();
        const double xd = s_vd * stream.normal();

        auto& bd = out.breakdown[j];
        bd.signal = s_in * rot.project(sig.x, sig.p, bit);
        bd.vacuum_count = 3;
        bd.vacuum[0] = s_in * rot.project(x0x, x0p, bit);
        bd.vacuum[1] = s_loss * rot.project(x1x, x1p, bit);
        bd.vacuum[2] = s_det * x2;
        bd.excess = s_in * rot.project(xex, xep, bit);
        bd.detector = xd;
        out.measurements[j] = bd.total();
    }
    return out;
}

ReceiveFrame spoof_terms(const TransmitFrame& frame, const ProtocolConfig& config,
                         RandomStream& stream) {
    const double eta_c = config.channel_transmittance;
    const double eta_d = config.detector_efficiency;
    const double gamma = config.spoofer_gain;
    // Heterodyne split at the spoofer, then re-preparation and the return leg.
    const double s_het = std::sqrt(eta_c / 2.0);
    const double s_het_loss = std::sqrt(1.0 - eta_c / 2.0);
    const double s_gain = std::sqrt(gamma);
    const double s_return = std::sqrt(eta_c * eta_d);
    const double s_return_loss = std::sqrt(eta_d * (1.0 - eta_c));
    const double s_det = std::sqrt(1.0 - eta_d);
    const double s_exc = std::sqrt(config.excess_noise);
    const double s_vd = std::sqrt(config.detector_noise);
    const Rotation rot{std::cos(config.phase_drift), std::sin(config.phase_drift)};

    const double k_in = s_return * s_gain * s_het;  // sqrt(eta_p)
    const double k_x3 = s_return * s_gain * s_het_loss;

    ReceiveFrame out;
    out.scenario = Scenario::spoofed;
    out.true_delay = config.true_delay;
    out.measurements.resize(config.receive_window_length);
    out.breakdown.resize(config.receive_window_length);
    for (std::size_t j = 0; j < out.measurements.size(); ++j) {
        const auto sig = slot_signal(frame, config.true_delay, j);
        const std::uint8_t bit = frame.basis[j];
        const double x0x = stream.normal(), x0p = stream.normal();
        const double xex = s_exc * stream.normal(), xep = s_exc * stream.normal();
        const double x3x = stream.normal(), x3p = stream.normal();
        const double x4x = stream.normal(), x4p = stream.normal();
        const double x5x = stream.normal(), x5p = stream.normal();
        const double x6 = stream.normal();
        const double xd = s_vd * stream.normal();

        auto& bd = out.breakdown[j];
        bd.signal = k_in * rot.project(sig.x, sig.p, bit);
        bd.vacuum_count = 5;
        bd.vacuum[0] = k_in * rot.project(x0x, x0p, bit);
        bd.vacuum[1] = k_x3 * rot.project(x3x, x3p, bit);
        bd.vacuum[2] = s_return * rot.project(x4x, x4p, bit);
        bd.vacuum[3] = s_return_loss * rot.project(x5x, x5p, bit);
        bd.vacuum[4] = s_det * x6;
        bd.excess = k_in * rot.project(xex, xep, bit);
        bd.detector = xd;
        out.measurements[j] = bd.total();
    }
    return out;
}

}  // namespace

ReceiveFrame honest_roundtrip(const TransmitFrame& frame, const ProtocolConfig& config,
                              RandomStream& stream, ChannelMode mode) {
    check_geometry(frame, config);
    if (mode == ChannelMode::aggregate)
        return aggregate_roundtrip(frame, config, stream, Scenario::honest);
    return honest_terms(frame, config, stream);
}

ReceiveFrame spoof_roundtrip(const TransmitFrame& frame, const ProtocolConfig& config,
                             RandomStream& stream, ChannelMode mode) {
    check_geometry(frame, config);
    if (mode == ChannelMode::aggregate)
        return aggregate_roundtrip(frame, config, stream, Scenario::spoofed);
    return spoof_terms(frame, config, stream);
}

ReceiveFrame roundtrip(Scenario scenario, const TransmitFrame& frame,
                       const ProtocolConfig& config, RandomStream& stream, ChannelMode mode) {
    return scenario == Scenario::honest ? honest_roundtrip(frame, config, stream, mode)
                                        : spoof_roundtrip(frame, config, stream, mode);
}

double snr_analytic(const ProtocolConfig& config, Scenario scenario) {
    const auto ch = linear_channel(config, scenario);
    return ch.eta * config.modulation_variance / ch.noise_var;
}

}  // namespace qlidar
