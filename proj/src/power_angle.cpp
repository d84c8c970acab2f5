#include "gfm/power_angle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gfm/errors.hpp"
#include "gfm/numerics.hpp"

namespace gfm {

namespace {

constexpr double kTangentSlope = 1e-6;
constexpr double kSlopeStep = 1e-4;

double total_power(const Scenario& s, double delta) { return operating_point(s, delta).p_total; }

}  // namespace

std::string_view to_string(EquilibriumKind kind) { return kind == EquilibriumKind::SEP ? "SEP" : "UEP"; }

std::vector<double> delta_grid(int n) {
    if (n < 1) throw ContractViolation("delta grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = -kPi + kTwoPi * (k + 1) / n;
    grid.back() = kPi;
    return grid;
}

OperatingPoint operating_point(const Scenario& s, double delta) {
    OperatingPoint op;
    op.delta = wrap_angle(delta);
    const ResistanceSolution sol = solve_equivalent_resistance(s, op.delta);
    op.r_eq = sol.r_eq;
    op.limiting = sol.limiting;
    op.c = scaling_from_resistance(op.r_eq, s.converter.k_pv);

    const Phasor e_ref = std::polar(s.converter.e_ref_mag, op.delta);
    op.v_f = fault_point_voltages(s.fault, s.network, e_ref, s.network.v_g(), op.r_eq, s.solver.fault_model);
    op.i_o = converter_currents(s.network, e_ref, op.v_f, op.r_eq);
    op.v_o = pcc_voltages(e_ref, op.i_o, op.r_eq);
    op.delta_f_pos = op.delta - phase_of(op.v_f.pos);

    op.p_pos = active_power_pos(op, s.network, s.converter.e_ref_mag);
    op.p_neg = active_power_neg(op, s.network);
    op.p_total = op.p_pos + op.p_neg;
    op.p_2w_amp = double_frequency_power(op);
    return op;
}

double active_power_pos(const OperatingPoint& op, const NetworkParams& net, double e) {
    const double r = op.r_eq;
    const double r1 = net.z_g1().real();
    const double x1 = net.z_g1().imag();
    const double v = std::abs(op.v_f.pos);
    const double den = (r + r1) * (r + r1) + x1 * x1;
    const double num = r1 * e * e + (r - r1) * e * v * std::cos(op.delta_f_pos) +
                       e * v * x1 * std::sin(op.delta_f_pos) - r * v * v;
    return num / den;
}

double active_power_neg(const OperatingPoint& op, const NetworkParams& net) {
    const double r = op.r_eq;
    const double r1 = net.z_g1().real();
    const double x1 = net.z_g1().imag();
    const double v = std::abs(op.v_f.neg);
    return -r * v * v / ((r + r1) * (r + r1) + x1 * x1);
}

double double_frequency_power(const OperatingPoint& op) {
    // With phase-a symmetrical components the cross-sequence term of v.i is
    // Re((V+ I- + V- I+) exp(j 2 w t)); in the dq+/dq- frames the same product reads
    // V+ conj(i-_dq) + V-_dq conj(I+), since i-_dq = conj(I-) up to a common rotation.
    return std::abs(op.v_o.pos * op.i_o.neg + op.v_o.neg * op.i_o.pos);
}

PdeltaCurve p_delta_curve(const Scenario& s, int points) {
    s.validate();
    if (points < 64) throw ValidationError("delta_points", ">= 64", points);
    PdeltaCurve curve;
    curve.scenario = s;
    curve.scenario_hash = scenario_hash(s);
    const std::vector<double> grid = delta_grid(points);
    curve.points.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        try {
            curve.points[k] = operating_point(s, grid[k]);
        } catch (const Error& e) {
            std::ostringstream os;
            os.precision(12);
            os << "P-delta sample failed at delta = " << grid[k] << " rad: " << e.what();
            throw SolverFailure(os.str());
        }
    });
    return curve;
}

std::vector<Equilibrium> find_equilibria(const PdeltaCurve& curve, double p_ref) {
    const auto& pts = curve.points;
    const std::size_t n = pts.size();
    std::vector<Equilibrium> out;
    if (n < 2) return out;
    const Scenario& s = curve.scenario;
    auto g = [&](std::size_t k) { return pts[k % n].p_total - p_ref; };
    auto f = [&](double d) { return total_power(s, d) - p_ref; };
    auto slope_at = [&](double d) { return (f(d + kSlopeStep) - f(d - kSlopeStep)) / (2.0 * kSlopeStep); };
    auto classify = [&](double d, bool touch) {
        Equilibrium e;
        e.delta = wrap_angle(d);
        e.slope = slope_at(d);
        const bool tangent = touch || std::abs(e.slope) < kTangentSlope;
        e.kind = (!tangent && e.slope > 0.0) ? EquilibriumKind::SEP : EquilibriumKind::UEP;
        return e;
    };

    for (std::size_t k = 0; k < n; ++k) {
        const double gk = g(k);
        const double gnext = g(k + 1);
        if (gk == 0.0) {
            const double gprev = g(k + n - 1);
            const bool touch = (gprev > 0.0) == (gnext > 0.0) && gprev != 0.0 && gnext != 0.0;
            out.push_back(classify(pts[k].delta, touch));
            continue;
        }
        if (gnext == 0.0 || (gk > 0.0) == (gnext > 0.0)) continue;
        const double lo = pts[k].delta;
        double hi = pts[(k + 1) % n].delta;
        if (hi <= lo) hi += kTwoPi;  // wrap-around pair
        const auto root = bisect(f, {lo, hi}, s.solver.equilibrium_tol);
        if (!root) throw SolverFailure("equilibrium refinement failed between " + std::to_string(lo) + " and " + std::to_string(hi));
        out.push_back(classify(*root, false));
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) { return a.delta < b.delta; });
    return out;
}

EquilibriumPair principal_equilibria(const std::vector<Equilibrium>& eqs) {
    EquilibriumPair pair;
    for (const auto& e : eqs) {
        if (e.kind == EquilibriumKind::SEP && (!pair.sep || std::abs(e.delta) < std::abs(*pair.sep))) pair.sep = e.delta;
    }
    if (!pair.sep) return pair;
    for (const auto& e : eqs) {
        if (e.kind != EquilibriumKind::UEP) continue;
        double d = e.delta;
        while (d <= *pair.sep) d += kTwoPi;
        if (!pair.uep || d < *pair.uep) pair.uep = d;
    }
    return pair;
}

}  // namespace gfm
