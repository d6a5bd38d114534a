#include "qlidar/ranging.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

namespace qlidar {

ConstructedSequences build_sequences(const TransmitFrame& frame,
                                     std::span<const std::uint8_t> bits) {
    if (bits.size() != frame.size() || frame.p.size() != frame.size())
        throw std::invalid_argument("basis bits (" + std::to_string(bits.size()) +
                                    ") and frame (" + std::to_string(frame.size()) +
                                    ") differ in length");
    ConstructedSequences seq;
    seq.t1.resize(frame.size());
    seq.t2.resize(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        if (bits[i] == 0) {
            seq.t1[i] = frame.x[i];
            seq.t2[i] = -frame.p[i];
        } else {
            seq.t1[i] = frame.p[i];
            seq.t2[i] = frame.x[i];
        }
    }
    return seq;
}

namespace {

// FFTW's planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

FftwBuffer<double> real_buffer(std::size_t n) {
    return FftwBuffer<double>(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}

FftwBuffer<fftw_complex> complex_buffer(std::size_t n) {
    return FftwBuffer<fftw_complex>(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n), real_(real_buffer(n)), spec_(complex_buffer(n / 2 + 1)) {
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_.get(), spec_.get(),
                                        FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_.get(), real_.get(),
                                        FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }

    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    // Zero-padded forward transform of `data`.
    std::vector<std::complex<double>> forward(std::span<const double> data) {
        std::fill(real_.get(), real_.get() + n_, 0.0);
        std::copy(data.begin(), data.end(), real_.get());
        fftw_execute(forward_);
        std::vector<std::complex<double>> out(bins());
        for (std::size_t k = 0; k < bins(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
        return out;
    }

    // Unnormalized inverse; returns the first `count` samples scaled by `scale`.
    std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum,
                                std::size_t count, double scale) {
        for (std::size_t k = 0; k < bins(); ++k) {
            spec_[k][0] = spectrum[k].real();
            spec_[k][1] = spectrum[k].imag();
        }
        fftw_execute(inverse_);
        std::vector<double> out(count);
        for (std::size_t d = 0; d < count; ++d) out[d] = real_[d] * scale;
        return out;
    }

private:
    std::size_t n_;
    FftwBuffer<double> real_;
    FftwBuffer<fftw_complex> spec_;
    fftw_plan forward_{};
    fftw_plan inverse_{};
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void correlate_fft(const TransmitFrame& frame, const ReceiveFrame& receive, std::size_t length,
                   CorrelationProfile& profile) {
    const auto& r = receive.measurements;
    const std::size_t lags = r.size() - length + 1;
    // Frame sample i < L meets slot i + d < M', so an M'-point transform never wraps.
    RealFft fft(next_pow2(r.size()));

    std::vector<double> r_x(r.size()), r_p(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        const bool p_basis = frame.basis[j] != 0;
        r_x[j] = p_basis ? 0.0 : r[j];
        r_p[j] = p_basis ? r[j] : 0.0;
    }
    const auto fx = fft.forward(std::span(frame.x).first(length));
    const auto fp = fft.forward(std::span(frame.p).first(length));
    const auto frx = fft.forward(r_x);
    const auto frp = fft.forward(r_p);

    std::vector<std::complex<double>> s1(fft.bins()), s2(fft.bins());
    for (std::size_t k = 0; k < fft.bins(); ++k) {
        const auto cx = std::conj(fx[k]);
        const auto cp = std::conj(fp[k]);
        s1[k] = cx * frx[k] + cp * frp[k];
        s2[k] = cx * frp[k] - cp * frx[k];
    }
    const double scale = 1.0 / (static_cast<double>(next_pow2(r.size())) * length);
    profile.c1 = fft.inverse(s1, lags, scale);
    profile.c2 = fft.inverse(s2, lags, scale);
}

}  // namespace

std::pair<double, double> correlate_at_lag(const TransmitFrame& frame,
                                           const ReceiveFrame& receive, std::size_t length,
                                           std::size_t lag) {
    const auto& r = receive.measurements;
    if (length > frame.size() || lag + length > r.size() || frame.basis.size() < r.size())
        throw InsufficientOverlap("lag " + std::to_string(lag) + " with length " +
                                  std::to_string(length) + " leaves the receive window");
    double c1 = 0.0;
    double c2 = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        const double ri = r[lag + i];
        if (frame.basis[lag + i] == 0) {
            c1 += frame.x[i] * ri;
            c2 -= frame.p[i] * ri;
        } else {
            c1 += frame.p[i] * ri;
            c2 += frame.x[i] * ri;
        }
    }
    const auto n = static_cast<double>(length);
    return {c1 / n, c2 / n};
}

CorrelationProfile moving_cross_correlation(const TransmitFrame& frame,
                                            const ReceiveFrame& receive, std::size_t ranging_length,
                                            CorrelationMethod method) {
    const auto& r = receive.measurements;
    if (ranging_length == 0 || ranging_length > frame.size())
        throw InsufficientOverlap("ranging length " + std::to_string(ranging_length) +
                                  " must lie in [1, frame length " +
                                  std::to_string(frame.size()) + "]");
    if (r.size() < ranging_length)
        throw InsufficientOverlap("receive window shorter than ranging length");
    if (frame.basis.size() != r.size())
        throw std::invalid_argument("basis bits do not cover the receive window");

    CorrelationProfile profile;
    profile.ranging_length = ranging_length;
    if (method == CorrelationMethod::fft) {
        correlate_fft(frame, receive, ranging_length, profile);
    } else {
        const std::size_t lags = r.size() - ranging_length + 1;
        profile.c1.resize(lags);
        profile.c2.resize(lags);
        for (std::size_t d = 0; d < lags; ++d)
            std::tie(profile.c1[d], profile.c2[d]) = correlate_at_lag(frame, receive, ranging_length, d);
    }

    double best = -1.0;
    for (std::size_t d = 0; d < profile.size(); ++d) {
        const double v = std::max(std::abs(profile.c1[d]), std::abs(profile.c2[d]));
        if (v > best) {
            best = v;
            profile.peak_lag = d;
        }
    }
    profile.c_max = best;
    const double a = profile.c1[profile.peak_lag];
    const double b = profile.c2[profile.peak_lag];
    const double norm = std::hypot(a, b);
    if (norm > 0.0) {
        profile.mu1_hat = a / norm;
        profile.mu2_hat = b / norm;
    }
    return profile;
}

double noise_floor_variance(double eta, double modulation_variance, double noise_var,
                            std::size_t length) {
    return modulation_variance * (eta * modulation_variance + noise_var) /
           static_cast<double>(length);
}

double peak_variance(double eta, double modulation_variance, double noise_var,
                     std::size_t length, double mu) {
    return eta * modulation_variance * modulation_variance * mu * mu /
               static_cast<double>(length) +
           noise_floor_variance(eta, modulation_variance, noise_var, length);
}

double analytic_noise_floor(const ProtocolConfig& config) {
    const auto ch = linear_channel(config, Scenario::honest);
    return noise_floor_variance(ch.eta, config.modulation_variance, ch.noise_var,
                                config.ranging_length);
}

double empirical_noise_floor(const CorrelationProfile& profile) {
    constexpr double chi2_1_median = 0.454936423119572694;
    std::vector<double> squares;
    squares.reserve(2 * profile.size());
    for (std::size_t d = 0; d < profile.size(); ++d) {
        if (d == profile.peak_lag) continue;
        squares.push_back(profile.c1[d] * profile.c1[d]);
        squares.push_back(profile.c2[d] * profile.c2[d]);
    }
    if (squares.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = squares.begin() + static_cast<std::ptrdiff_t>(squares.size() / 2);
    std::nth_element(squares.begin(), mid, squares.end());
    return *mid / chi2_1_median;
}

RangingVerdict detect_target(const CorrelationProfile& profile, const ProtocolConfig& config,
                             NoiseFloorSource source) {
    RangingVerdict v;
    v.noise_floor = source == NoiseFloorSource::analytic ? analytic_noise_floor(config)
                                                         : empirical_noise_floor(profile);
    v.threshold_used = config.correlation_threshold_sigma * std::sqrt(v.noise_floor);
    v.estimated_delay = profile.peak_lag;
    v.detected = profile.c_max > 0.0 && profile.c_max >= v.threshold_used;
    const double a = profile.size() ? profile.c1[profile.peak_lag] : 0.0;
    const double b = profile.size() ? profile.c2[profile.peak_lag] : 0.0;
    v.phase_estimate = (a == 0.0 && b == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                              : estimate_phase(a, b);
    return v;
}

double estimate_phase(double c1_peak, double c2_peak) {
    if (c1_peak == 0.0 && c2_peak == 0.0)
        throw UndefinedPhase("both correlation peaks are zero; phase is undefined");
    return std::atan2(c2_peak, c1_peak);
}

TransmitFrame compensate_phase(const TransmitFrame& frame, double delta_hat) {
    const double c = std::cos(delta_hat);
    const double s = std::sin(delta_hat);
    TransmitFrame out;
    out.basis = frame.basis;
    out.x.resize(frame.size());
    out.p.resize(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out.x[i] = frame.x[i] * c - frame.p[i] * s;
        out.p[i] = frame.x[i] * s + frame.p[i] * c;
    }
    return out;
}

}  // namespace qlidar
