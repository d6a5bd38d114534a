// Domain types shared by every stage of the quantum-secured LiDAR simulator.
//
// All variances are in shot-noise units (SNU, vacuum quadrature variance = 1);
// stored quadrature samples are in sqrt(SNU).

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlidar {

enum class Scenario { honest, spoofed };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct ProtocolConfig {
    double modulation_variance = 1000.0;      // V_M
    std::size_t frame_length = 2048;          // M, interrogating pulses
    std::size_t receive_window_length = 0;    // M', basis bits / receive slots
    std::size_t ranging_length = 2048;        // L
    double channel_transmittance = 0.0316227766016838;  // one-way eta_c
    double target_reflectivity = 0.1;         // eta_r
    double detector_efficiency = 1.0;         // eta_d
    double detector_noise = 0.05;             // V_d
    double excess_noise = 0.05;               // xi_0
    double spoofer_gain = 0.2;                // gamma
    double phase_drift = 0.0;                 // delta, radians
    std::size_t true_delay = 100;             // samples
    double correlation_threshold_sigma = 2.0; // k in C_th = k sqrt(V_C^nf)
    double excess_noise_threshold = 20.0;     // xi_th
    std::uint64_t rng_seed = 1;

    /// Default operating point: eta_r = 0.1,
    /// eta_d = 1, V_d = 0.05, xi_0 = 0.05, eta_c^2 = 1e-3 (eta_a = 1e-4).
    static ProtocolConfig paper_defaults();
};

/// M' = true_delay + M + guard with guard = M.
std::size_t default_receive_window(const ProtocolConfig& config);

/// Resets receive_window_length to default_receive_window().
void fit_receive_window(ProtocolConfig& config);

/// Lists every violated constraint; empty when the config is valid.
std::vector<std::string> config_violations(const ProtocolConfig& config);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Returns the config unchanged when valid, otherwise throws ConfigError
/// naming every violated constraint.
ProtocolConfig validate_config(const ProtocolConfig& config);

struct DerivedChannel {
    double eta_total_honest;  // eta_a = eta_d eta_c^2 eta_r
    double eta_total_spoof;   // eta_p = gamma eta_c^2 eta_d / 2
    double noise_var_honest;  // V_Na = eta_a xi_0 + V_d + 1
    double noise_var_spoof;   // V_Np = eta_p xi_1 + V_d + 1
    double spoof_excess;      // xi_1 = xi_0 + 2 / eta_c
};

DerivedChannel derive_channel(const ProtocolConfig& config);

/// Total efficiency and noise variance seen by the receiver in a scenario.
struct LinearChannel {
    double eta;
    double noise_var;
    double excess;  // xi referred to the transmitter output
};

LinearChannel linear_channel(const ProtocolConfig& config, Scenario scenario);

/// Rewrites reflectivity and one-way transmittance so that both the honest
/// and the spoofed channel have total efficiency `eta` at the configured
/// gain: eta_r = gamma / 2 and eta_c = sqrt(2 eta / (gamma eta_d)).
ProtocolConfig at_total_efficiency(ProtocolConfig config, double eta);

/// Sets modulation_variance so the honest SNR equals `snr_db`.
ProtocolConfig at_honest_snr_db(ProtocolConfig config, double snr_db);

double db_to_linear(double db);
double linear_to_db(double ratio);

}  // namespace qlidar
