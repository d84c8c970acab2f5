#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfm/phasor.hpp"
#include "gfm/scenario.hpp"

namespace gfm {

/// Fully solved limiter-aware state at one power angle.
struct OperatingPoint {
    double delta = 0.0;
    double r_eq = 0.0;
    double c = 1.0;
    SequenceSet v_f;
    SequenceSet i_o;
    SequenceSet v_o;
    double delta_f_pos = 0.0;  // delta - arg(V_f+)
    double p_pos = 0.0;
    double p_neg = 0.0;
    double p_total = 0.0;
    double p_2w_amp = 0.0;
    bool limiting = false;
};

struct PdeltaCurve {
    Scenario scenario;  // kept so equilibria can be refined on the exact model
    std::string scenario_hash;
    std::vector<OperatingPoint> points;  // delta strictly increasing over (-pi, pi]
};

enum class EquilibriumKind { SEP, UEP };

struct Equilibrium {
    double delta = 0.0;
    EquilibriumKind kind = EquilibriumKind::SEP;
    double slope = 0.0;  // dP_o/d(delta) at the root, pu/rad
};

std::string_view to_string(EquilibriumKind kind);

/// The uniform grid of n points over (-pi, pi]: -pi + 2 pi (k + 1) / n.
std::vector<double> delta_grid(int n);

OperatingPoint operating_point(const Scenario& scenario, double delta);

/// Closed-form positive-sequence power from (R_eq, R_g1, X_g1, E_ref, |V_f+|, delta_f+).
double active_power_pos(const OperatingPoint& op, const NetworkParams& net, double e_ref_mag);

/// Closed-form negative-sequence power -R_eq |V_f-|^2 / ((R_eq + R_g1)^2 + X_g1^2).
double active_power_neg(const OperatingPoint& op, const NetworkParams& net);

/// Amplitude of the cross-sequence power oscillating at twice the fundamental frequency.
double double_frequency_power(const OperatingPoint& op);

/// Samples operating_point over delta_grid(points); fails on the first bad sample with its delta.
PdeltaCurve p_delta_curve(const Scenario& scenario, int points);

/// All crossings of P_o(delta) = p_ref, refined on the exact model and classified by slope.
/// Near-tangent roots (|slope| < 1e-6 pu/rad) and touch points are reported as UEP.
std::vector<Equilibrium> find_equilibria(const PdeltaCurve& curve, double p_ref);

/// Convenience: stable and unstable equilibria of a curve (first of each kind, if any).
struct EquilibriumPair {
    std::optional<double> sep;
    std::optional<double> uep;
};
EquilibriumPair principal_equilibria(const std::vector<Equilibrium>& eqs);

}  // namespace gfm
