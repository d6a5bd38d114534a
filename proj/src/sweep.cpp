#include "qlidar/sweep.hpp"

#include "qlidar/estimation.hpp"
#include "qlidar/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qlidar {

SweepVariable sweep_variable_from_string(const std::string& name) {
    if (name == "gain") return SweepVariable::gain;
    if (name == "transmittance") return SweepVariable::transmittance;
    if (name == "snr") return SweepVariable::snr;
    if (name == "phase_drift") return SweepVariable::phase_drift;
    if (name == "length_L") return SweepVariable::length_L;
    if (name == "pulses_M") return SweepVariable::pulses_M;
    if (name == "threshold") return SweepVariable::threshold;
    throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

SweepFormula sweep_formula_from_string(const std::string& name) {
    if (name == "snr_honest") return SweepFormula::snr_honest;
    if (name == "snr_ratio") return SweepFormula::snr_ratio;
    if (name == "target_pd") return SweepFormula::target_pd;
    if (name == "target_roc") return SweepFormula::target_roc;
    if (name == "security_roc") return SweepFormula::security_roc;
    throw std::invalid_argument("unknown sweep formula '" + name + "'");
}

void Table::append(const Table& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    errors.insert(errors.end(), other.errors.begin(), other.errors.end());
}

std::vector<double> linear_grid(double first, double last, std::size_t points) {
    if (points < 2) throw std::invalid_argument("a grid needs at least two points");
    std::vector<double> grid(points);
    const double step = (last - first) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = first + step * static_cast<double>(i);
    grid.back() = last;
    return grid;
}

namespace {

bool strictly_monotone(const std::vector<double>& g) {
    if (g.size() < 2) return true;
    const bool up = g[1] > g[0];
    for (std::size_t i = 1; i < g.size(); ++i)
        if (up ? !(g[i] > g[i - 1]) : !(g[i] < g[i - 1])) return false;
    return true;
}

bool is_roc(SweepFormula f) {
    return f == SweepFormula::target_roc || f == SweepFormula::security_roc;
}

ProtocolConfig apply(ProtocolConfig c, SweepVariable variable, double x) {
    switch (variable) {
        case SweepVariable::gain: c.spoofer_gain = x; break;
        case SweepVariable::transmittance: c.channel_transmittance = x; break;
        case SweepVariable::snr: c = at_honest_snr_db(c, x); break;
        case SweepVariable::phase_drift: c.phase_drift = x * std::numbers::pi / 180.0; break;
        case SweepVariable::length_L:
            if (!(x >= 1.0)) throw std::domain_error("length_L must be >= 1");
            c.ranging_length = static_cast<std::size_t>(std::llround(x));
            break;
        case SweepVariable::pulses_M:
            if (!(x >= 1.0)) throw std::domain_error("pulses_M must be >= 1");
            c.frame_length = static_cast<std::size_t>(std::llround(x));
            fit_receive_window(c);
            break;
        case SweepVariable::threshold: break;
    }
    return c;
}

std::string point_error(double x, const std::string& what) {
    std::ostringstream out;
    out << "x=" << x << ": " << what;
    return out.str();
}

}  // namespace

Table sweep(const SweepSpec& spec, SweepFormula formula) {
    if (!strictly_monotone(spec.grid)) throw std::invalid_argument("sweep grid is not strictly monotone");
    if (is_roc(formula) != (spec.variable == SweepVariable::threshold))
        throw std::invalid_argument("ROC formulas sweep the threshold variable and nothing else");

    Table table;
    if (is_roc(formula)) {
        const auto violations = config_violations(spec.fixed);
        if (!violations.empty()) {
            for (const auto& v : violations) table.errors.push_back(v);
            return table;
        }
        const auto roc = formula == SweepFormula::target_roc
                             ? target_roc_analytic(spec.fixed, spec.grid)
                             : security_roc_analytic(spec.fixed, spec.grid);
        for (const auto& pt : roc) table.rows.push_back({pt.p_fa, pt.p_d, spec.series});
        return table;
    }

    for (double x : spec.grid) {
        ProtocolConfig c;
        try {
            c = apply(spec.fixed, spec.variable, x);
        } catch (const std::exception& e) {
            table.errors.push_back(point_error(x, e.what()));
            continue;
        }
        const auto violations = config_violations(c);
        if (!violations.empty()) {
            for (const auto& v : violations) table.errors.push_back(point_error(x, v));
            continue;
        }
        double y = 0.0;
        switch (formula) {
            case SweepFormula::snr_honest:
                y = linear_to_db(snr_analytic(c, Scenario::honest));
                break;
            case SweepFormula::snr_ratio:
                y = snr_analytic(c, Scenario::spoofed) / snr_analytic(c, Scenario::honest);
                break;
            case SweepFormula::target_pd: y = target_detection_probability(c); break;
            default: break;
        }
        table.rows.push_back({x, y, spec.series});
    }
    return table;
}

namespace {

template <typename T>
std::string label(const std::string& name, T value) {
    std::ostringstream out;
    out << name << '=' << value;
    return out.str();
}

ProtocolConfig with_frame(ProtocolConfig c, std::size_t m) {
    c.frame_length = m;
    fit_receive_window(c);
    return c;
}

std::vector<double> security_thresholds(const ProtocolConfig& c) {
    const auto m = security_model(c);
    const double sh = std::sqrt(m.var_honest);
    const double ss = std::sqrt(m.var_spoof);
    return linear_grid(m.mean_honest - 4.0 * sh,
                       std::max(m.mean_spoof + 4.0 * ss, m.mean_honest + 6.0 * sh));
}

std::vector<double> target_thresholds(const ProtocolConfig& c) {
    const auto m = target_model(c);
    return linear_grid(-4.0 * std::sqrt(m.var_floor), m.c_max + 4.0 * std::sqrt(m.var_peak));
}

Table security_series(const ProtocolConfig& c, const std::string& series) {
    return sweep({SweepVariable::threshold, security_thresholds(c), c, series},
                 SweepFormula::security_roc);
}

}  // namespace

Table figure_table(int figure) {
    const auto base = ProtocolConfig::paper_defaults();
    Table table;
    switch (figure) {
        case 2: {  // SNR_a versus total efficiency for three modulation variances
            const auto etas = linear_grid(1e-5, 1e-3);
            for (double vm : {100.0, 500.0, 1000.0}) {
                auto c = base;
                c.modulation_variance = vm;
                std::vector<double> eta_c;
                for (double eta : etas)
                    eta_c.push_back(std::sqrt(eta / (c.detector_efficiency * c.target_reflectivity)));
                auto part = sweep({SweepVariable::transmittance, eta_c, c, label("V_M", vm)},
                                  SweepFormula::snr_honest);
                for (auto& row : part.rows)
                    row.x = row.x * row.x * c.detector_efficiency * c.target_reflectivity;
                table.append(part);
            }
            break;
        }
        case 3:
            for (double eta_c : {0.1, 0.05, 0.01}) {
                auto c = base;
                c.channel_transmittance = eta_c;
                table.append(sweep({SweepVariable::gain, linear_grid(0.01, 1.0), c,
                                    label("eta_c", eta_c)},
                                   SweepFormula::snr_ratio));
            }
            break;
        case 4:
            for (std::size_t l : {512u, 1024u, 2048u}) {
                auto c = with_frame(base, 2048);
                c.ranging_length = l;
                c.phase_drift = 0.0;
                table.append(sweep({SweepVariable::snr, linear_grid(-30.0, 0.0), c, label("L", l)},
                                   SweepFormula::target_pd));
            }
            break;
        case 5:
            for (std::size_t l : {512u, 1024u, 2048u}) {
                auto c = at_honest_snr_db(with_frame(base, 2048), -15.0);
                c.ranging_length = l;
                table.append(sweep({SweepVariable::phase_drift, linear_grid(0.0, 360.0, 361), c,
                                    label("L", l)},
                                   SweepFormula::target_pd));
            }
            break;
        case 6:
            for (std::size_t l : {512u, 1024u, 2048u}) {
                auto c = at_honest_snr_db(with_frame(base, 2048), -15.0);
                c.ranging_length = l;
                c.phase_drift = 0.0;
                table.append(sweep({SweepVariable::threshold, target_thresholds(c), c, label("L", l)},
                                   SweepFormula::target_roc));
            }
            break;
        case 7:
            for (double eta : {1e-5, 5e-5, 1e-4}) {
                auto c = at_total_efficiency(with_frame(base, 1'000'000), eta);
                table.append(security_series(c, label("eta", eta)));
            }
            break;
        case 8:
            for (double gamma : {0.1, 0.2, 0.3}) {
                auto c = with_frame(base, 1'000'000);
                c.spoofer_gain = gamma;
                table.append(security_series(at_total_efficiency(c, 1e-4), label("gamma", gamma)));
            }
            break;
        case 9: {
            const std::pair<double, std::size_t> cases[] = {
                {0.1, 1'000'000}, {0.2, 1'000'000}, {0.1, 2'000'000}};
            for (const auto& [gamma, m] : cases) {
                auto c = with_frame(base, m);
                c.spoofer_gain = gamma;
                table.append(security_series(at_total_efficiency(c, 1e-4),
                                             label("gamma", gamma) + ";" + label("M", m)));
            }
            break;
        }
        default:
            throw std::out_of_range("no recipe for figure " + std::to_string(figure) +
                                    " (expected 2..9)");
    }
    return table;
}

}  // namespace qlidar
