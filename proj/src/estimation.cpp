#include "qlidar/estimation.hpp"

#include "qlidar/analytics.hpp"
#include "qlidar/ranging.hpp"

#include <cmath>
#include <string>

namespace qlidar {

NoiseEstimate estimate_parameters(std::span<const double> t1, std::span<const double> r,
                                  const ProtocolConfig& config) {
    if (t1.size() != r.size())
        throw std::invalid_argument("regressor length " + std::to_string(t1.size()) +
                                    " != measurement length " + std::to_string(r.size()));
    double sum_tr = 0.0;
    double sum_tt = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        sum_tr += t1[i] * r[i];
        sum_tt += t1[i] * t1[i];
    }
    if (!(sum_tt > 0.0)) throw DegenerateRegressor("regressor T1 has zero energy");

    NoiseEstimate e;
    e.sample_count = t1.size();
    e.sqrt_eta_hat = sum_tr / sum_tt;
    double rss = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        const double resid = r[i] - e.sqrt_eta_hat * t1[i];
        rss += resid * resid;
    }
    const auto m = static_cast<double>(e.sample_count);
    e.vn_hat = rss / m;
    e.v_eps_hat = e.vn_hat - (1.0 + config.detector_noise);
    e.var_v_eps = 2.0 * e.vn_hat * e.vn_hat / m;

    // mu_1 = 1 once the phase has been compensated.
    const double vm = config.modulation_variance;
    const double eta_hat = e.sqrt_eta_hat * e.sqrt_eta_hat;
    e.var_sqrt_eta = vm > 0.0
                         ? peak_variance(eta_hat, vm, e.vn_hat, e.sample_count, 1.0) / (vm * vm)
                         : 0.0;
    return e;
}

SecurityVerdict security_decide(const NoiseEstimate& estimate, const ProtocolConfig& config) {
    SecurityVerdict v;
    const double eta_hat = estimate.sqrt_eta_hat * estimate.sqrt_eta_hat;
    v.v_eps_threshold = eta_hat * config.excess_noise_threshold;
    v.spoof_detected = estimate.v_eps_hat > v.v_eps_threshold;
    v.p_false_alarm = exceedance_probability(v.v_eps_threshold, eta_hat * config.excess_noise,
                                             estimate.var_v_eps);
    return v;
}

SecurityModel security_model(const ProtocolConfig& config) {
    const auto d = derive_channel(config);
    const auto m = static_cast<double>(config.frame_length);
    return {d.eta_total_honest * config.excess_noise,
            2.0 * d.noise_var_honest * d.noise_var_honest / m,
            d.eta_total_spoof * d.spoof_excess,
            2.0 * d.noise_var_spoof * d.noise_var_spoof / m};
}

std::vector<RocPoint> security_roc_analytic(const ProtocolConfig& config,
                                            std::span<const double> threshold_grid) {
    const auto model = security_model(config);
    std::vector<RocPoint> roc;
    roc.reserve(threshold_grid.size());
    for (double th : threshold_grid) {
        roc.push_back({th, exceedance_probability(th, model.mean_honest, model.var_honest),
                       exceedance_probability(th, model.mean_spoof, model.var_spoof)});
    }
    return roc;
}

double security_detection_at(const ProtocolConfig& config, double p_fa) {
    const auto model = security_model(config);
    const double th = invert_threshold(p_fa, model.mean_honest, model.var_honest);
    return exceedance_probability(th, model.mean_spoof, model.var_spoof);
}

double excess_threshold_for_false_alarm(const ProtocolConfig& config, double p_fa) {
    const auto model = security_model(config);
    return invert_threshold(p_fa, model.mean_honest, model.var_honest) /
           derive_channel(config).eta_total_honest;
}

TargetModel target_model(const ProtocolConfig& config) {
    const auto ch = linear_channel(config, Scenario::honest);
    const double mu1 = std::abs(std::cos(config.phase_drift));
    const double mu2 = std::abs(std::sin(config.phase_drift));
    const int dominant = mu1 >= mu2 ? 1 : 2;
    const double mu = dominant == 1 ? mu1 : mu2;
    const double vm = config.modulation_variance;
    return {std::sqrt(ch.eta) * vm * mu,
            peak_variance(ch.eta, vm, ch.noise_var, config.ranging_length, mu),
            noise_floor_variance(ch.eta, vm, ch.noise_var, config.ranging_length), dominant};
}

std::vector<RocPoint> target_roc_analytic(const ProtocolConfig& config,
                                          std::span<const double> threshold_grid) {
    const auto model = target_model(config);
    std::vector<RocPoint> roc;
    roc.reserve(threshold_grid.size());
    for (double th : threshold_grid) {
        roc.push_back({th, exceedance_probability(th, 0.0, model.var_floor),
                       exceedance_probability(th, model.c_max, model.var_peak)});
    }
    return roc;
}

double target_detection_probability(const ProtocolConfig& config) {
    const auto model = target_model(config);
    const double th = config.correlation_threshold_sigma * std::sqrt(model.var_floor);
    return exceedance_probability(th, model.c_max, model.var_peak);
}

double target_false_alarm_probability(const ProtocolConfig& config) {
    const auto model = target_model(config);
    const double th = config.correlation_threshold_sigma * std::sqrt(model.var_floor);
    return exceedance_probability(th, 0.0, model.var_floor);
}

}  // namespace qlidar
