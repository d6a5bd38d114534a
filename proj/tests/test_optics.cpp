#include "qlidar/optics.hpp"
#include "qlidar/ranging.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace qlidar;

namespace {

struct Stats {
    double mean = 0, var = 0;
    std::size_t n = 0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    s.n = v.size();
    for (double x : v) s.mean += x;
    s.mean /= s.n;
    for (double x : v) s.var += (x - s.mean) * (x - s.mean);
    s.var /= (s.n - 1);
    return s;
}

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = stats(a).mean, mb = stats(b).mean;
    double c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma) * (b[i] - mb);
    return c / (a.size() - 1);
}

std::vector<double> echo_window(const ReceiveFrame& rx, const ProtocolConfig& c) {
    return {rx.measurements.begin() + c.true_delay,
            rx.measurements.begin() + c.true_delay + c.frame_length};
}

ProtocolConfig big_frame(std::size_t m = 100000) {
    auto c = ProtocolConfig::paper_defaults();
    c.frame_length = m;
    c.ranging_length = 1024;
    fit_receive_window(c);
    return c;
}

}  // namespace

TEST_CASE("zero modulation gives zero quadratures") {
    auto c = ProtocolConfig::paper_defaults();
    c.modulation_variance = 0.0;
    RandomStream s(1);
    const auto f = modulate(c, s);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(f.x[i] == 0.0);
        CHECK(f.p[i] == 0.0);
    }
}

TEST_CASE("modulation moments") {
    auto c = big_frame();
    c.modulation_variance = 100.0;
    RandomStream s(2);
    const auto f = modulate(c, s);
    CHECK(f.basis.size() == c.receive_window_length);
    const auto sx = stats(f.x), sp = stats(f.p);
    CHECK(std::abs(sx.var - 100.0) <= 1.5);
    CHECK(std::abs(sp.var - 100.0) <= 1.5);
    CHECK(std::abs(covariance(f.x, f.p)) <= 3 * 100.0 / std::sqrt(double(c.frame_length)));
    double ones = 0;
    for (auto b : f.basis) ones += b;
    const double n = static_cast<double>(f.basis.size());
    CHECK(std::abs(ones / n - 0.5) <= 3 * 0.5 / std::sqrt(n));
}

TEST_CASE("lossless drift-free channel adds shot noise only") {
    auto c = big_frame(20000);
    c.channel_transmittance = 1.0;
    c.target_reflectivity = 1.0;
    c.detector_efficiency = 1.0;
    c.detector_noise = 0.0;
    c.excess_noise = 0.0;
    for (auto mode : {ChannelMode::aggregate, ChannelMode::term_by_term}) {
        RandomStream s(3);
        const auto f = modulate(c, s);
        const auto rx = honest_roundtrip(f, c, s, mode);
        std::vector<double> residual;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::size_t j = i + c.true_delay;
            const double sent = f.basis[j] ? f.p[i] : f.x[i];
            residual.push_back(rx.measurements[j] - sent);
            if (mode == ChannelMode::term_by_term) {
                CHECK(rx.breakdown[j].signal == sent);
                CHECK(rx.breakdown[j].vacuum[1] == 0.0);
                CHECK(rx.breakdown[j].vacuum[2] == 0.0);
            }
        }
        const auto r = stats(residual);
        CHECK(std::abs(r.var - 1.0) <= 3 * std::sqrt(2.0 / r.n));
    }
}

TEST_CASE("honest and spoofed echo variances") {
    const auto c = big_frame();
    for (auto scenario : {Scenario::honest, Scenario::spoofed}) {
        const auto ch = linear_channel(c, scenario);
        const double expected = ch.eta * c.modulation_variance + ch.noise_var;
        for (auto mode : {ChannelMode::aggregate, ChannelMode::term_by_term}) {
            RandomStream s(4);
            const auto f = modulate(c, s);
            const auto w = stats(echo_window(roundtrip(scenario, f, c, s, mode), c));
            CAPTURE(to_string(scenario));
            CHECK(std::abs(w.var - expected) <= 3 * expected * std::sqrt(2.0 / w.n));
        }
    }
    const auto d = derive_channel(c);
    CHECK(d.noise_var_spoof ==
          doctest::Approx(d.eta_total_spoof * (c.excess_noise + 2 / c.channel_transmittance) + 1.05));
}

TEST_CASE("term-by-term and aggregate modes agree in variance") {
    const auto c = big_frame();
    for (auto scenario : {Scenario::honest, Scenario::spoofed}) {
        RandomStream s(5);
        const auto f = modulate(c, s);
        const auto a = stats(echo_window(roundtrip(scenario, f, c, s, ChannelMode::aggregate), c));
        const auto t = stats(echo_window(roundtrip(scenario, f, c, s, ChannelMode::term_by_term), c));
        const double ratio = t.var / a.var;
        CHECK(ratio >= 0.95);
        CHECK(ratio <= 1.05);
    }
}

TEST_CASE("breakdown reproduces every emitted sample") {
    auto c = big_frame(5000);
    c.phase_drift = 1.1;
    RandomStream s(6);
    const auto f = modulate(c, s);
    for (auto scenario : {Scenario::honest, Scenario::spoofed}) {
        const auto rx = roundtrip(scenario, f, c, s, ChannelMode::term_by_term);
        REQUIRE(rx.breakdown.size() == rx.measurements.size());
        for (std::size_t j = 0; j < rx.measurements.size(); ++j) {
            const auto& b = rx.breakdown[j];
            double sum = b.signal + b.excess + b.detector;
            for (std::size_t k = 0; k < b.vacuum_count; ++k) sum += b.vacuum[k];
            CHECK(rx.measurements[j] == b.total());
            CHECK(std::abs(sum - rx.measurements[j]) <= 1e-12 * (1 + std::abs(sum)));
        }
        CHECK(rx.breakdown.front().vacuum_count == (scenario == Scenario::honest ? 3u : 5u));
        CHECK(rx.breakdown.front().signal == 0.0);  // before the echo arrives
    }
}

TEST_CASE("vanishing spoofer gain erases the signal") {
    auto c = big_frame();
    c.spoofer_gain = 1e-12;
    RandomStream s(7);
    const auto f = modulate(c, s);
    const auto rx = spoof_roundtrip(f, c, s);
    const auto w = echo_window(rx, c);
    std::vector<double> sent;
    for (std::size_t i = 0; i < f.size(); ++i) sent.push_back(f.basis[i + c.true_delay] ? f.p[i] : f.x[i]);
    const double floor = derive_channel(c).noise_var_spoof;
    CHECK(floor == doctest::Approx(c.detector_noise + 1.0 + c.spoofer_gain * c.channel_transmittance));
    const auto ws = stats(w);
    CHECK(std::abs(ws.var - floor) <= 3 * floor * std::sqrt(2.0 / ws.n));
    const double sd_cov = std::sqrt(c.modulation_variance * floor / ws.n);
    CHECK(std::abs(covariance(sent, w)) <= 3 * sd_cov);
}

TEST_CASE("aligned covariance follows the drift") {
    for (double delta : {0.0, std::numbers::pi / 2, 2.0}) {
        for (auto scenario : {Scenario::honest, Scenario::spoofed}) {
            auto c = big_frame();
            c.phase_drift = delta;
            RandomStream s(8);
            const auto f = modulate(c, s);
            const auto rx = roundtrip(scenario, f, c, s, ChannelMode::term_by_term);
            const auto seq = build_sequences(
                f, std::span(f.basis).subspan(c.true_delay, c.frame_length));
            const auto w = echo_window(rx, c);
            const auto ch = linear_channel(c, scenario);
            const double vm = c.modulation_variance, n = double(c.frame_length);
            const double sd = std::sqrt((2 * ch.eta * vm * vm + vm * ch.noise_var) / n);
            CAPTURE(delta);
            CHECK(std::abs(covariance(seq.t1, w) - std::sqrt(ch.eta) * vm * std::cos(delta)) <= 3 * sd);
            CHECK(std::abs(covariance(seq.t2, w) - std::sqrt(ch.eta) * vm * std::sin(delta)) <= 3 * sd);
        }
    }
}

TEST_CASE("analytic SNR") {
    const auto c = ProtocolConfig::paper_defaults();
    CHECK(snr_analytic(c, Scenario::honest) == doctest::Approx(0.0952).epsilon(1e-3));
    CHECK(linear_to_db(snr_analytic(c, Scenario::honest)) == doctest::Approx(-10.2).epsilon(1e-2));
    auto big = c;
    big.spoofer_gain = 1e12;
    const double xi1 = derive_channel(big).spoof_excess;
    CHECK(snr_analytic(big, Scenario::spoofed) ==
          doctest::Approx(c.modulation_variance / xi1).epsilon(1e-6));
}

TEST_CASE("geometry errors") {
    const auto c = ProtocolConfig::paper_defaults();
    RandomStream s(9);
    auto f = modulate(c, s);
    auto longer = f;
    longer.x.resize(c.receive_window_length);
    longer.p.resize(c.receive_window_length);
    CHECK_THROWS_AS(honest_roundtrip(longer, c, s), WindowOverflow);
    auto short_bits = f;
    short_bits.basis.pop_back();
    CHECK_THROWS_AS(spoof_roundtrip(short_bits, c, s), std::invalid_argument);
    auto bad = c;
    bad.frame_length = 0;
    CHECK_THROWS_AS(modulate(bad, s), ConfigError);
}
