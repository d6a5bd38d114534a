#include "qlidar/analytics.hpp"
#include "qlidar/optics.hpp"
#include "qlidar/sweep.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <set>

using namespace qlidar;
using boost::multiprecision::cpp_bin_float_50;

TEST_CASE("erfc against a 50-digit reference") {
    double worst = 0.0;
    for (int i = -1000; i <= 1000; ++i) {
        const double x = i / 100.0;
        const cpp_bin_float_50 ref = boost::multiprecision::erfc(cpp_bin_float_50(x));
        const double got = qlidar::erfc(x);
        const double rel = static_cast<double>(abs((cpp_bin_float_50(got) - ref) / ref));
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("erfc values and reflection") {
    CHECK(qlidar::erfc(0.0) == 1.0);
    CHECK(qlidar::erfc(std::sqrt(2.0)) == doctest::Approx(0.0455002638963584).epsilon(1e-14));
    for (double x : {0.01, 0.3, 1.7, 4.2, 9.9})
        CHECK(qlidar::erfc(-x) == doctest::Approx(2.0 - qlidar::erfc(x)).epsilon(1e-15));
}

TEST_CASE("exceedance probability") {
    CHECK(exceedance_probability(0.0, 0.0, 1.0) == 0.5);
    CHECK(exceedance_probability(2.0, 0.0, 1.0) == doctest::Approx(0.02275013194817921));
    CHECK(exceedance_probability(1.0, 1.0, 0.0) == 1.0);
    CHECK(exceedance_probability(1.0 + 1e-9, 1.0, 0.0) == 0.0);
}

TEST_CASE("threshold inversion") {
    CHECK(invert_threshold(0.5, 3.0, 2.0) == doctest::Approx(3.0).epsilon(1e-12));
    const double v = 7.0;
    CHECK(std::abs(invert_threshold(0.5 * std::erfc(std::sqrt(2.0)), 0.0, v) - 2 * std::sqrt(v)) <= 1e-6);
    for (double p : {1e-12, 1e-6, 1e-3, 0.023, 0.3, 0.7, 0.999, 1 - 1e-9}) {
        const double th = invert_threshold(p, -1.5, 0.25);
        CHECK(exceedance_probability(th, -1.5, 0.25) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK_THROWS_AS(invert_threshold(0.0, 0, 1), UnattainableTarget);
    CHECK_THROWS_AS(invert_threshold(1.0, 0, 1), UnattainableTarget);
    CHECK_THROWS_AS(invert_threshold(0.5, 0, 0), UnattainableTarget);
}

TEST_CASE("linear grids") {
    const auto g = linear_grid(0.01, 1.0);
    CHECK(g.size() == 200);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 1.0);
    CHECK_THROWS_AS(linear_grid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("snr ratio sweep") {
    auto c = ProtocolConfig::paper_defaults();
    c.channel_transmittance = 0.05;
    SweepSpec spec{SweepVariable::gain, linear_grid(0.01, 1.0), c, "eta_c=0.05"};
    const auto a = sweep(spec, SweepFormula::snr_ratio);
    const auto b = sweep(spec, SweepFormula::snr_ratio);
    REQUIRE(a.rows.size() == 200);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].y == b.rows[i].y);
        CHECK(a.rows[i].series == "eta_c=0.05");
        if (i) CHECK(a.rows[i].y > a.rows[i - 1].y);
    }
}

TEST_CASE("snr crossover sits at twice the reflectivity") {
    const auto c = ProtocolConfig::paper_defaults();
    const auto ratio = [&](double gamma) {
        auto x = c;
        x.spoofer_gain = gamma;
        return snr_analytic(x, Scenario::spoofed) / snr_analytic(x, Scenario::honest);
    };
    double lo = 0.01, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < 1.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(lo - 2 * c.target_reflectivity) <= 0.01);
}

TEST_CASE("sweep domain handling") {
    const auto c = ProtocolConfig::paper_defaults();
    SweepSpec bad{SweepVariable::gain, {0.1, 0.3, 0.2}, c, "s"};
    CHECK_THROWS_AS(sweep(bad, SweepFormula::snr_ratio), std::invalid_argument);
    SweepSpec roc_wrong{SweepVariable::gain, {0.1, 0.2}, c, "s"};
    CHECK_THROWS_AS(sweep(roc_wrong, SweepFormula::security_roc), std::invalid_argument);
    SweepSpec partly{SweepVariable::transmittance, {0.5, 1.0, 1.5}, c, "s"};
    const auto t = sweep(partly, SweepFormula::snr_honest);
    CHECK(t.rows.size() == 2);
    CHECK(t.errors.size() == 1);
    CHECK(sweep_variable_from_string("phase_drift") == SweepVariable::phase_drift);
    CHECK(sweep_formula_from_string("target_roc") == SweepFormula::target_roc);
    CHECK_THROWS_AS(sweep_variable_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("figure recipes") {
    for (int n = 2; n <= 9; ++n) {
        const auto t = figure_table(n);
        CAPTURE(n);
        CHECK_FALSE(t.rows.empty());
        CHECK(t.errors.empty());
    }
    std::set<std::string> series;
    for (const auto& r : figure_table(8).rows) series.insert(r.series);
    CHECK(series == std::set<std::string>{"gamma=0.1", "gamma=0.2", "gamma=0.3"});
    CHECK_THROWS_AS(figure_table(1), std::out_of_range);
    CHECK_THROWS_AS(figure_table(10), std::out_of_range);
}
