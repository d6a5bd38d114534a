#include "qlidar/core.hpp"

#include <cmath>
#include <sstream>

namespace qlidar {

const char* to_string(Scenario s) {
    return s == Scenario::honest ? "honest" : "spoofed";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "honest") return Scenario::honest;
    if (name == "spoofed") return Scenario::spoofed;
    throw std::invalid_argument("unknown scenario '" + name + "' (expected honest|spoofed)");
}

ProtocolConfig ProtocolConfig::paper_defaults() {
    ProtocolConfig c;
    c.channel_transmittance = std::sqrt(1e-3);
    fit_receive_window(c);
    return c;
}

std::size_t default_receive_window(const ProtocolConfig& config) {
    return config.true_delay + 2 * config.frame_length;
}

void fit_receive_window(ProtocolConfig& config) {
    config.receive_window_length = default_receive_window(config);
}

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }

std::string join(const std::vector<std::string>& items) {
    std::ostringstream out;
    out << "invalid configuration:";
    for (const auto& item : items) out << "\n  - " << item;
    return out.str();
}

}  // namespace

std::vector<std::string> config_violations(const ProtocolConfig& c) {
    std::vector<std::string> v;
    if (!std::isfinite(c.modulation_variance) || c.modulation_variance < 0.0)
        v.emplace_back("modulation_variance must be finite and >= 0");
    if (c.frame_length == 0) v.emplace_back("frame_length must be positive");
    if (c.ranging_length == 0) v.emplace_back("ranging_length must be positive");
    if (c.ranging_length > c.frame_length) v.emplace_back("ranging_length exceeds frame_length");
    if (c.receive_window_length <= c.frame_length)
        v.emplace_back("receive_window_length must exceed frame_length");
    if (c.true_delay + c.frame_length > c.receive_window_length)
        v.emplace_back("true_delay + frame_length exceeds receive_window_length");
    if (!in_unit_interval(c.channel_transmittance))
        v.emplace_back("channel_transmittance out of (0,1]");
    if (!in_unit_interval(c.target_reflectivity))
        v.emplace_back("target_reflectivity out of (0,1]");
    if (!in_unit_interval(c.detector_efficiency))
        v.emplace_back("detector_efficiency out of (0,1]");
    if (!std::isfinite(c.detector_noise) || c.detector_noise < 0.0)
        v.emplace_back("detector_noise must be finite and >= 0");
    if (!std::isfinite(c.excess_noise) || c.excess_noise < 0.0)
        v.emplace_back("excess_noise must be finite and >= 0");
    if (!std::isfinite(c.spoofer_gain) || c.spoofer_gain <= 0.0)
        v.emplace_back("spoofer_gain must be finite and > 0");
    if (!std::isfinite(c.phase_drift)) v.emplace_back("phase_drift must be finite");
    if (!std::isfinite(c.correlation_threshold_sigma) || c.correlation_threshold_sigma <= 0.0)
        v.emplace_back("correlation_threshold_sigma must be finite and > 0");
    if (!std::isfinite(c.excess_noise_threshold) || c.excess_noise_threshold <= 0.0)
        v.emplace_back("excess_noise_threshold must be finite and > 0");
    return v;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

ProtocolConfig validate_config(const ProtocolConfig& config) {
    auto violations = config_violations(config);
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return config;
}

DerivedChannel derive_channel(const ProtocolConfig& c) {
    const double eta_c2 = c.channel_transmittance * c.channel_transmittance;
    DerivedChannel d{};
    d.eta_total_honest = eta_c2 * c.detector_efficiency * c.target_reflectivity;
    d.eta_total_spoof = eta_c2 * c.detector_efficiency * (c.spoofer_gain / 2.0);
    d.spoof_excess = c.excess_noise + 2.0 / c.channel_transmittance;
    d.noise_var_honest = d.eta_total_honest * c.excess_noise + c.detector_noise + 1.0;
    d.noise_var_spoof = d.eta_total_spoof * d.spoof_excess + c.detector_noise + 1.0;
    return d;
}

LinearChannel linear_channel(const ProtocolConfig& config, Scenario scenario) {
    const auto d = derive_channel(config);
    if (scenario == Scenario::honest)
        return {d.eta_total_honest, d.noise_var_honest, config.excess_noise};
    return {d.eta_total_spoof, d.noise_var_spoof, d.spoof_excess};
}

ProtocolConfig at_total_efficiency(ProtocolConfig config, double eta) {
    config.target_reflectivity = config.spoofer_gain / 2.0;
    config.channel_transmittance =
        std::sqrt(2.0 * eta / (config.spoofer_gain * config.detector_efficiency));
    return config;
}

ProtocolConfig at_honest_snr_db(ProtocolConfig config, double snr_db) {
    const auto d = derive_channel(config);
    config.modulation_variance = db_to_linear(snr_db) * d.noise_var_honest / d.eta_total_honest;
    return config;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace qlidar
