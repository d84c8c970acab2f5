#pragma once

#include <utility>

#include "gfm/phasor.hpp"

namespace gfm {

struct Scenario;

/// Converter ratings and control constants. Defaults are the reference operating point;
/// k_pv and k_iv are assumptions (the analytical pipeline never needs them).
struct ConverterParams {
    double e_ref_mag = 1.1;
    double i_lim = 1.2;
    double k_pv = 1.0;
    double k_iv = 5.0;  // voltage-loop integrator gain, pu/s (time-domain only)
    double p_ref = 0.7;
    double k_apc = 0.02;
    double omega_c = kTwoPi * 0.3;
    double omega_n = kTwoPi * 60.0;

    void validate() const;
};

struct PhasePeaks {
    double peak_a = 0.0;
    double peak_b = 0.0;
    double peak_c = 0.0;
    double max_peak = 0.0;
};

struct LimiterResult {
    double c_pos = 1.0;
    double c_neg = 1.0;
    Phasor limited_pos{};
    Phasor limited_neg{};
    double r_eq = 0.0;
};

/// Per-phase peaks of a current built from a positive-sequence reference and a negative-sequence
/// reference, both expressed in their own synchronous frames (dq+ rotating with +theta, dq-
/// with -theta). Only the angle sum arg(i_pos) + arg(i_neg) matters.
/// peak_a, peak_b, peak_c use angle shifts 0, -2pi/3, +2pi/3. For a waveform whose phase b lags a
/// (inverse_clarke), peak_b is the peak of phase c and peak_c that of phase b; max_peak is unaffected.
PhasePeaks phase_peaks(Phasor i_pos, Phasor i_neg);

/// c = min(1, i_lim / max_peak), with c = 1 when max_peak = 0.
double scaling_factor(double max_peak, double i_lim);

/// Scales each sequence reference by its own factor; both factors must lie in (0, 1].
std::pair<Phasor, Phasor> apply_limit(Phasor refs_pos, Phasor refs_neg, double c_pos, double c_neg);

/// R_eq = (1 - c) / (c k_pv), shared by both sequence networks.
double equivalent_resistance(double c, double k_pv);

/// Inverse of equivalent_resistance: c = 1 / (1 + r_eq k_pv).
double scaling_from_resistance(double r_eq, double k_pv);

/// Coupled elliptical limiting (c+ = c-) of a reference pair.
LimiterResult limit_coupled(Phasor refs_pos, Phasor refs_neg, double i_lim, double k_pv);

/// Decoupled limiting: c- = priority * c+, with c+ chosen so the worst phase peak equals i_lim.
/// priority in (0, 1] favours the positive sequence. Only the time-domain path uses this.
LimiterResult limit_decoupled(Phasor refs_pos, Phasor refs_neg, double i_lim, double priority);

/// Largest converter phase-current peak for the scenario's network and fault at power angle
/// delta when the saturated loops are represented by r_eq.
double max_output_current(const Scenario& scenario, double delta, double r_eq);

struct ResistanceSolution {
    double r_eq = 0.0;
    bool limiting = false;
};

/// Finds the r_eq that drives the worst converter phase peak to i_lim, or 0 when the limit is
/// not reached with r_eq = 0. Throws SolverFailure when no bracket is found below the cap.
ResistanceSolution solve_equivalent_resistance(const Scenario& scenario, double delta);

}  // namespace gfm
