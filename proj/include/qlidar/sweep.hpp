// Closed-form parameter sweeps and the figure recipes built on them.

#pragma once

#include "qlidar/core.hpp"

#include <string>
#include <vector>

namespace qlidar {

enum class SweepVariable {
    gain,           // spoofer_gain
    transmittance,  // one-way channel_transmittance
    snr,            // honest SNR in dB (sets V_M)
    phase_drift,    // degrees
    length_L,       // ranging_length
    pulses_M,       // frame_length
    threshold,      // decision threshold, for the ROC formulas
};

enum class SweepFormula {
    snr_honest,    // SNR_a in dB
    snr_ratio,     // SNR_p / SNR_a
    target_pd,     // P_d^T at C_th = k sqrt(V_C^nf)
    target_roc,    // (P_fa^T, P_d^T) per threshold
    security_roc,  // (P_fa^S, P_d^S) per threshold
};

SweepVariable sweep_variable_from_string(const std::string& name);
SweepFormula sweep_formula_from_string(const std::string& name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::gain;
    std::vector<double> grid;
    ProtocolConfig fixed = ProtocolConfig::paper_defaults();
    std::string series;
};

struct TableRow {
    double x;
    double y;
    std::string series;
};

struct Table {
    std::vector<TableRow> rows;
    std::vector<std::string> errors;  // per-point domain violations

    void append(const Table& other);
};

/// Evaluates `formula` at every grid point. Points whose config is invalid
/// are reported in Table::errors and skipped. ROC formulas need the
/// threshold variable and emit (P_fa, P_d) as (x, y).
Table sweep(const SweepSpec& spec, SweepFormula formula);

/// `points` evenly spaced values from `first` to `last` inclusive.
std::vector<double> linear_grid(double first, double last, std::size_t points = 200);

/// Figure recipes 2..9; throws std::out_of_range for other numbers.
Table figure_table(int figure);

}  // namespace qlidar
