#pragma once

#include <string>
#include <string_view>

#include "gfm/limiter.hpp"
#include "gfm/network.hpp"

namespace gfm {

enum class CurveMode { Exact, Interpolated };

/// Tolerances, grids and step sizes shared by the analyses.
struct SolverSettings {
    double r_eq_tol = 1e-10;
    double r_eq_cap = 1048576.0;  // 2^20 pu
    int delta_points = 1000;
    double equilibrium_tol = 1e-9;
    double swing_dt = 1e-4;
    double horizon = 5.0;
    double settle_band = 0.05;
    double fault_on = 0.0;
    double cct_resolution = 1e-3;
    CurveMode curve_mode = CurveMode::Exact;
    FaultModel fault_model = FaultModel::AsPrinted;
    double sim_dt = 1e-5;
    double control_dt = 1e-4;

    void validate() const;
};

/// The single input record for every analysis.
struct Scenario {
    NetworkParams network;
    ConverterParams converter;
    FaultSpec fault;
    SolverSettings solver;

    void validate() const;

    /// Copy of this scenario with a different fault.
    Scenario with_fault(FaultSpec f) const {
        Scenario s = *this;
        s.fault = f;
        return s;
    }
};

/// Canonical INI serialization (every field, full precision, fixed order).
std::string serialize_scenario(const Scenario& scenario);

/// 16 hex digits of FNV-1a over the canonical serialization.
std::string scenario_hash(const Scenario& scenario);

std::string_view to_string(CurveMode mode);
CurveMode parse_curve_mode(std::string_view text);

}  // namespace gfm
