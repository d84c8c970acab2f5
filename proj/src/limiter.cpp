#include "gfm/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "gfm/errors.hpp"
#include "gfm/numerics.hpp"
#include "gfm/scenario.hpp"

namespace gfm {

void ConverterParams::validate() const {
    if (!(std::isfinite(e_ref_mag) && e_ref_mag >= 0.0)) throw ValidationError("converter.e_ref_mag", ">= 0", e_ref_mag);
    if (!(i_lim > 0.0)) throw ValidationError("converter.i_lim", "> 0", i_lim);
    if (!(std::isfinite(k_pv) && k_pv > 0.0)) throw ValidationError("converter.k_pv", "> 0", k_pv);
    if (!(std::isfinite(k_iv) && k_iv >= 0.0)) throw ValidationError("converter.k_iv", ">= 0", k_iv);
    if (!std::isfinite(p_ref)) throw ValidationError("converter.p_ref", "finite", p_ref);
    if (!(std::isfinite(k_apc) && k_apc > 0.0)) throw ValidationError("converter.k_apc", "> 0", k_apc);
    if (!(std::isfinite(omega_c) && omega_c > 0.0)) throw ValidationError("converter.omega_c", "> 0", omega_c);
    if (!(omega_c / kTwoPi < 5.0)) throw ValidationError("converter.omega_c", "bandwidth below 5 Hz", omega_c);
    if (!(std::isfinite(omega_n) && omega_n > 0.0)) throw ValidationError("converter.omega_n", "> 0", omega_n);
}

PhasePeaks phase_peaks(Phasor i_pos, Phasor i_neg) {
    const double a = std::abs(i_pos);
    const double b = std::abs(i_neg);
    const double sum = phase_of(i_pos) + phase_of(i_neg);
    auto peak = [&](double shift) {
        // Clamp tiny negative round-off when the two sequences nearly cancel.
        return std::sqrt(std::max(0.0, a * a + b * b + 2.0 * a * b * std::cos(sum + shift)));
    };
    PhasePeaks p;
    p.peak_a = peak(0.0);
    p.peak_b = peak(-kTwoPi / 3.0);
    p.peak_c = peak(kTwoPi / 3.0);
    p.max_peak = std::max({p.peak_a, p.peak_b, p.peak_c});
    return p;
}

double scaling_factor(double max_peak, double i_lim) {
    if (!(i_lim > 0.0)) throw ContractViolation("i_lim must be > 0");
    if (max_peak <= 0.0) return 1.0;
    return std::min(1.0, i_lim / max_peak);
}

std::pair<Phasor, Phasor> apply_limit(Phasor refs_pos, Phasor refs_neg, double c_pos, double c_neg) {
    if (!(c_pos > 0.0 && c_pos <= 1.0) || !(c_neg > 0.0 && c_neg <= 1.0)) {
        throw ContractViolation("scaling factors must lie in (0, 1], got c+ = " + std::to_string(c_pos) +
                                ", c- = " + std::to_string(c_neg));
    }
    return {c_pos * refs_pos, c_neg * refs_neg};
}

double equivalent_resistance(double c, double k_pv) {
    if (!(c > 0.0 && c <= 1.0)) throw ContractViolation("c must lie in (0, 1], got " + std::to_string(c));
    if (!(k_pv > 0.0)) throw ContractViolation("k_pv must be > 0");
    return (1.0 - c) / (c * k_pv);
}

double scaling_from_resistance(double r_eq, double k_pv) {
    if (!(r_eq >= 0.0)) throw ContractViolation("r_eq must be >= 0");
    if (!(k_pv > 0.0)) throw ContractViolation("k_pv must be > 0");
    return 1.0 / (1.0 + r_eq * k_pv);
}

LimiterResult limit_coupled(Phasor refs_pos, Phasor refs_neg, double i_lim, double k_pv) {
    const double c = scaling_factor(phase_peaks(refs_pos, refs_neg).max_peak, i_lim);
    LimiterResult r;
    r.c_pos = r.c_neg = c;
    std::tie(r.limited_pos, r.limited_neg) = apply_limit(refs_pos, refs_neg, c, c);
    r.r_eq = equivalent_resistance(c, k_pv);
    return r;
}

LimiterResult limit_decoupled(Phasor refs_pos, Phasor refs_neg, double i_lim, double priority) {
    if (!(priority > 0.0 && priority <= 1.0)) throw ContractViolation("priority must lie in (0, 1]");
    LimiterResult r;
    if (phase_peaks(refs_pos, refs_neg).max_peak > i_lim) {
        // The peaks are homogeneous of degree one in a common scale factor.
        r.c_pos = scaling_factor(phase_peaks(refs_pos, priority * refs_neg).max_peak, i_lim);
        r.c_neg = priority * r.c_pos;
    }
    std::tie(r.limited_pos, r.limited_neg) = apply_limit(refs_pos, refs_neg, r.c_pos, r.c_neg);
    r.r_eq = 0.0;  // no single equivalent resistance when c+ != c-
    return r;
}

double max_output_current(const Scenario& s, double delta, double r_eq) {
    const Phasor e_ref = std::polar(s.converter.e_ref_mag, delta);
    const SequenceSet v_f =
        fault_point_voltages(s.fault, s.network, e_ref, s.network.v_g(), r_eq, s.solver.fault_model);
    const SequenceSet i_o = converter_currents(s.network, e_ref, v_f, r_eq);
    // The limiter works on the negative sequence in the negatively rotating frame.
    return phase_peaks(i_o.pos, std::conj(i_o.neg)).max_peak;
}

ResistanceSolution solve_equivalent_resistance(const Scenario& s, double delta) {
    const double i_lim = s.converter.i_lim;
    if (max_output_current(s, delta, 0.0) <= i_lim) return {0.0, false};

    auto residual = [&](double r) { return max_output_current(s, delta, r) - i_lim; };
    double hi = 1.0;
    while (residual(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > s.solver.r_eq_cap) {
            throw SolverFailure("r_eq not bracketed below " + std::to_string(s.solver.r_eq_cap) +
                                " pu at delta = " + std::to_string(delta));
        }
    }
    const double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    const auto root = bisect(residual, {lo, hi}, s.solver.r_eq_tol);
    if (!root) throw SolverFailure("r_eq bisection failed at delta = " + std::to_string(delta));
    return {*root, true};
}

}  // namespace gfm
