#include "gfm/scenario.hpp"

#include <cmath>
#include <string>

#include "gfm/errors.hpp"

namespace gfm {

void SolverSettings::validate() const {
    if (!(r_eq_tol > 0.0)) throw ValidationError("solver.r_eq_tol", "> 0", r_eq_tol);
    if (!(r_eq_cap >= 1.0)) throw ValidationError("solver.r_eq_cap", ">= 1", r_eq_cap);
    if (delta_points < 64) throw ValidationError("solver.delta_points", ">= 64", delta_points);
    if (!(equilibrium_tol > 0.0)) throw ValidationError("solver.equilibrium_tol", "> 0", equilibrium_tol);
    if (!(swing_dt > 0.0 && swing_dt <= 1e-3)) throw ValidationError("solver.swing_dt", "0 < dt <= 1e-3 s", swing_dt);
    if (!(horizon > 0.0)) throw ValidationError("solver.horizon", "> 0", horizon);
    if (!(settle_band > 0.0)) throw ValidationError("solver.settle_band", "> 0", settle_band);
    if (!(fault_on >= 0.0)) throw ValidationError("solver.fault_on", ">= 0", fault_on);
    if (!(cct_resolution > 0.0)) throw ValidationError("solver.cct_resolution", "> 0", cct_resolution);
    if (!(sim_dt > 0.0 && sim_dt <= 1e-5)) throw ValidationError("solver.sim_dt", "0 < dt <= 1e-5 s", sim_dt);
    if (!(control_dt >= sim_dt && control_dt <= 1e-4)) {
        throw ValidationError("solver.control_dt", "sim_dt <= dt <= 1e-4 s", control_dt);
    }
    const double ratio = control_dt / sim_dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6) {
        throw ValidationError("solver.control_dt", "integer multiple of solver.sim_dt", control_dt);
    }
}

void Scenario::validate() const {
    network.validate();
    converter.validate();
    fault.validate();
    solver.validate();
    if (std::abs(network.omega_n - converter.omega_n) > 1e-9 * network.omega_n) {
        throw ValidationError("converter.omega_n", "equal to network.omega_n", converter.omega_n);
    }
}

std::string_view to_string(CurveMode mode) {
    return mode == CurveMode::Exact ? "exact" : "interpolated";
}

CurveMode parse_curve_mode(std::string_view text) {
    if (text == "exact") return CurveMode::Exact;
    if (text == "interpolated") return CurveMode::Interpolated;
    throw ContractViolation("unknown curve mode '" + std::string(text) + "' (exact|interpolated)");
}

}  // namespace gfm
