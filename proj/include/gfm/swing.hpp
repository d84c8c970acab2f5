#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gfm/scenario.hpp"

namespace gfm {

/// delta in rad, omega as per-unit frequency deviation (d delta/dt = omega_n omega).
struct SwingState {
    double delta = 0.0;
    double omega = 0.0;
};

struct EventTimeline {
    double fault_on = 0.0;
    double fault_duration = 0.0;
    double horizon = 5.0;

    double clearing_time() const { return fault_on + fault_duration; }
    void validate() const;
};

enum class SwingPhase { Pre, Fault, Post };
enum class Verdict { Stable, Unstable };

std::string_view to_string(SwingPhase phase);
std::string_view to_string(Verdict verdict);

struct SwingSample {
    double t = 0.0;
    SwingState state;
    double p_o = 0.0;
    SwingPhase phase = SwingPhase::Pre;
};

struct SwingTrace {
    double dt = 0.0;
    std::vector<SwingSample> samples;
    Verdict verdict = Verdict::Stable;
    std::optional<double> first_uep_crossing;
};

/// Constants of the reduced synchronization loop.
struct SwingConstants {
    double omega_n;
    double omega_c;
    double k_apc;
    double p_ref;

    static SwingConstants from(const ConverterParams& conv) {
        return {conv.omega_n, conv.omega_c, conv.k_apc, conv.p_ref};
    }
};

/// Active power as a function of the (unwrapped) power angle.
using PowerCurve = std::function<double(double delta)>;

/// Early exit for integrate_swing: once the state is past `uep` with omega > 0 after clearing,
/// the remaining horizon is skipped.
struct StopAtUep {
    double uep;
};

/// Fixed-step classical RK4 on
///   d delta/dt = omega_n omega,  d omega/dt = omega_c k_apc (p_ref - P(delta)) - omega_c omega,
/// using `pre` before fault_on, `fault` until clearing and `post` afterwards. Event times that
/// fall inside a step split it, so the recorded grid stays uniform. Throws DivergenceError on a
/// non-finite state.
SwingTrace integrate_swing(const SwingConstants& k, const PowerCurve& pre, const PowerCurve& fault,
                           const PowerCurve& post, const EventTimeline& timeline,
                           SwingState init, double dt,
                           std::optional<StopAtUep> stop = std::nullopt);

/// Unstable if, after `clearing_time`, delta passes the post-fault UEP with omega > 0, or if it
/// does not enter and stay within `band` of the post-fault SEP by the end of the trace. A missing
/// SEP is Unstable. Records first_uep_crossing and verdict on the trace.
Verdict classify_stability(SwingTrace& trace, std::optional<double> post_fault_uep,
                           std::optional<double> post_fault_sep, double clearing_time,
                           double band);

/// Power-angle evaluator for a scenario, honoring solver.curve_mode.
PowerCurve make_power_curve(const Scenario& scenario);

struct ClearingRun {
    double fault_duration;
    Verdict verdict;
};

struct CctResult {
    std::optional<double> cct;  // nullopt = Unbounded
    double resolution = 0.0;
    double pre_fault_sep = 0.0;
    std::optional<double> post_fault_uep;
    std::vector<ClearingRun> runs;             // every duration evaluated, ascending
    std::vector<double> monotonicity_violations;  // stable durations above an unstable one
    bool unbounded() const { return !cct.has_value(); }
};

/// Everything needed to integrate one fault/clearing sequence of a scenario.
struct SwingSetup {
    SwingConstants constants;
    PowerCurve pre;
    PowerCurve fault;
    PowerCurve post;
    double sep = 0.0;
    std::optional<double> uep;
};

/// Builds curves (pre/post = unfaulted network, fault = scenario fault) and the pre-fault
/// equilibria. Throws SolverFailure when the pre-fault curve has no SEP.
SwingSetup make_swing_setup(const Scenario& scenario);

/// Integrates and classifies one clearing time.
SwingTrace run_clearing(const Scenario& scenario, const SwingSetup& setup, double fault_duration,
                        double settle, bool stop_early);

/// Largest fault duration on the `resolution` grid that stays Stable. `horizon` is both the
/// post-clearing observation window and the longest duration tried; a stable horizon-length
/// fault gives Unbounded. The grid is searched by bisection on the step index, then the
/// boundary pair is confirmed by direct integration.
CctResult critical_clearing_time(const Scenario& scenario, double resolution, double horizon);

}  // namespace gfm
