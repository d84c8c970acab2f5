#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gfm/phasor.hpp"
#include "gfm/scenario.hpp"
#include "gfm/swing.hpp"

namespace gfm {

struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double sum() const { return a + b + c; }
};

/// Amplitude-invariant Clarke transform (zero sequence dropped) and its inverse.
Phasor clarke(const ThreePhase& x);
ThreePhase inverse_clarke(Phasor alpha_beta);

/// Second-order generalized integrator pair (one per alpha/beta channel), discretized with a
/// frequency-prewarped bilinear transform so the quadrature outputs are exact at the centre
/// frequency.
struct DsogiState {
    std::array<double, 2> alpha{};  // in-phase, quadrature
    std::array<double, 2> beta{};
    double u_alpha = 0.0;  // previous input samples
    double u_beta = 0.0;
};

struct DsogiOutput {
    Phasor pos{};  // positive sequence in the frame rotating with +theta
    Phasor neg{};  // negative sequence in the frame rotating with -theta
    DsogiState next;
};

inline constexpr double kDsogiGain = 1.4142135623730951;

/// One sample of the DSOGI sequence extractor at fixed centre frequency omega_ff.
DsogiOutput dsogi_extract(const DsogiState& state, const ThreePhase& x, double omega_ff, double dt,
                          double theta);

/// DSOGI state already in steady state for the given positive/negative dq phasors at angle theta.
DsogiState dsogi_steady_state(Phasor pos, Phasor neg, double theta);

enum class CurrentLoop { Ideal, Lag };

struct SimOptions {
    CurrentLoop current_loop = CurrentLoop::Ideal;
    // s; first-order lag of each sequence current in its own synchronous frame. Must stay well
    // below c_f / (k_pv * omega_n); about 80 us already oscillates with the defaults.
    double current_lag_tau = 5e-5;
    int record_every = 10;                 // circuit steps per recorded sample
    std::optional<double> frozen_delta;    // rad; disables the power loop
    std::optional<double> initial_delta;   // rad, power loop at rest; default: pre-fault SEP
    std::optional<double> decoupled_priority;  // c- = priority c+; coupled ECL when unset
};

/// Recorded waveforms. Voltages are PCC phase-to-ground, currents are converter-side.
struct SimTrace {
    double dt = 0.0;  // sample spacing
    double omega_n = 0.0;
    std::vector<double> t;
    std::vector<ThreePhase> v_o;
    std::vector<ThreePhase> i_o;
    std::vector<double> p_inst;
    std::vector<double> c;
    std::vector<double> theta_ref;
    std::vector<double> delta;
    std::vector<double> omega;
    std::vector<Phasor> v_pos_est;  // DSOGI estimates in the controller dq frames
    std::vector<Phasor> v_neg_est;
    std::vector<Phasor> i_pos_ref;  // limited current references
    std::vector<Phasor> i_neg_ref;
    double max_zero_sum = 0.0;      // largest |ia + ib + ic| over every circuit step

    std::size_t size() const { return t.size(); }
};

/// Average-model simulation of the converter, filter, split grid impedance and fault.
/// The fault of `scenario` is applied over [fault_on, fault_on + fault_duration).
SimTrace simulate(const Scenario& scenario, const EventTimeline& timeline,
                  const SimOptions& options = {});

struct SteadyPower {
    double p_dc = 0.0;
    double p_2w_amp = 0.0;
};

/// Mean and 2w amplitude of p_inst over the window of whole 2w periods ending at `end` (default:
/// end of trace). Throws NotSettledError when the means of the two halves differ by more than 1 %.
SteadyPower steady_state_power(const SimTrace& trace, double window,
                               std::optional<double> end = std::nullopt);

/// Fundamental-frequency symmetrical components over whole cycles ending at `end` (default: end
/// of trace), with phase angles referred to the grid voltage.
struct MeasuredSequences {
    SequenceSet v;
    SequenceSet i;
    double max_phase_peak = 0.0;
};
MeasuredSequences measure_sequences(const SimTrace& trace, double window,
                                    std::optional<double> end = std::nullopt);

/// Phasors of phase quantities sampled on a uniform grid, via one-bin DFT at omega over the
/// given samples (which should span whole periods).
/// Samples [first, last) are used; last = 0 means the end of x.
Phasor fundamental_phasor(const std::vector<double>& t, const std::vector<double>& x,
                          std::size_t first, double omega, std::size_t last = 0);

}  // namespace gfm
