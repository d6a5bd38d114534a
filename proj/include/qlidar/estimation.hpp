// Finite-size parameter estimation, the excess-noise security check, and the
// analytic ROC curves for target detection and spoof detection.

#pragma once

#include "qlidar/core.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace qlidar {

struct NoiseEstimate {
    double sqrt_eta_hat = 0.0;  // sum T1 R / sum T1^2
    double vn_hat = 0.0;        // mean squared regression residual
    double v_eps_hat = 0.0;     // vn_hat - (1 + V_d)
    double var_sqrt_eta = 0.0;  // V_C1^p / V_M^2 with plug-in eta_hat, vn_hat
    double var_v_eps = 0.0;     // 2 vn_hat^2 / M
    std::size_t sample_count = 0;
};

class DegenerateRegressor : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// `t1` and `r` must be aligned, phase compensated, and of equal length.
NoiseEstimate estimate_parameters(std::span<const double> t1, std::span<const double> r,
                                  const ProtocolConfig& config);

struct SecurityVerdict {
    bool spoof_detected = false;
    double v_eps_threshold = 0.0;  // sqrt_eta_hat^2 * xi_th
    double p_false_alarm = 0.0;    // analytic P_fa^S at this threshold (plug-in)
};

/// Alarm iff v_eps_hat > threshold; equality is no alarm.
SecurityVerdict security_decide(const NoiseEstimate& estimate, const ProtocolConfig& config);

struct RocPoint {
    double threshold;
    double p_fa;
    double p_d;
};

/// Mean and variance of the excess-noise estimator in both scenarios:
/// V_eps = eta xi and D(V_eps) = 2 V_N^2 / M.
struct SecurityModel {
    double mean_honest;
    double var_honest;
    double mean_spoof;
    double var_spoof;
};

SecurityModel security_model(const ProtocolConfig& config);

std::vector<RocPoint> security_roc_analytic(const ProtocolConfig& config,
                                            std::span<const double> threshold_grid);

/// P_d^S at the threshold that gives the requested P_fa^S.
double security_detection_at(const ProtocolConfig& config, double p_fa);

/// xi_th reproducing a requested analytic P_fa^S when multiplied by eta_a.
double excess_threshold_for_false_alarm(const ProtocolConfig& config, double p_fa);

/// Target-detection model at the config's L and delta (honest channel):
/// C_max = sqrt(eta) V_M max(|cos d|, |sin d|) with V_C^p of the dominant
/// sequence and the noise floor V_C^nf.
struct TargetModel {
    double c_max;
    double var_peak;
    double var_floor;
    int dominant;  // 1 or 2
};

TargetModel target_model(const ProtocolConfig& config);

std::vector<RocPoint> target_roc_analytic(const ProtocolConfig& config,
                                          std::span<const double> threshold_grid);

/// P_d^T at the configured C_th = k sqrt(V_C^nf).
double target_detection_probability(const ProtocolConfig& config);

/// P_fa^T at the configured C_th.
double target_false_alarm_probability(const ProtocolConfig& config);

}  // namespace qlidar
