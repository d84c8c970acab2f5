#include "gfm/swing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "gfm/errors.hpp"
#include "gfm/numerics.hpp"
#include "gfm/power_angle.hpp"

namespace gfm {

void EventTimeline::validate() const {
    if (!(fault_on >= 0.0)) throw ValidationError("timeline.fault_on", ">= 0", fault_on);
    if (!(fault_duration >= 0.0)) throw ValidationError("timeline.fault_duration", ">= 0", fault_duration);
    if (!(horizon > clearing_time())) throw ValidationError("timeline.horizon", "> fault_on + fault_duration", horizon);
}

std::string_view to_string(SwingPhase phase) {
    switch (phase) {
        case SwingPhase::Pre: return "pre";
        case SwingPhase::Fault: return "fault";
        case SwingPhase::Post: return "post";
    }
    return "pre";
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::Stable ? "stable" : "unstable"; }

namespace {

struct Derivative {
    double d_delta;
    double d_omega;
    double p_o;
};

Derivative swing_rhs(const SwingConstants& k, const PowerCurve& curve, SwingState x) {
    const double p = curve(x.delta);
    return {k.omega_n * x.omega, k.omega_c * k.k_apc * (k.p_ref - p) - k.omega_c * x.omega, p};
}

bool finite(SwingState x) { return std::isfinite(x.delta) && std::isfinite(x.omega); }

}  // namespace

SwingTrace integrate_swing(const SwingConstants& k, const PowerCurve& pre, const PowerCurve& fault,
                           const PowerCurve& post, const EventTimeline& timeline, SwingState init,
                           double dt, std::optional<StopAtUep> stop) {
    timeline.validate();
    if (!(dt > 0.0 && dt <= 1e-3)) throw ContractViolation("swing dt must lie in (0, 1e-3] s");
    if (!finite(init)) throw ContractViolation("non-finite initial swing state");

    const double t_on = timeline.fault_on;
    const double t_clear = timeline.clearing_time();
    auto phase_at = [&](double t) {
        if (t < t_on) return SwingPhase::Pre;
        if (t < t_clear) return SwingPhase::Fault;
        return SwingPhase::Post;
    };
    auto curve_for = [&](SwingPhase ph) -> const PowerCurve& {
        return ph == SwingPhase::Pre ? pre : (ph == SwingPhase::Fault ? fault : post);
    };

    SwingTrace trace;
    trace.dt = dt;
    const auto steps = static_cast<std::size_t>(std::llround(timeline.horizon / dt));
    trace.samples.reserve(steps + 1);

    SwingState x = init;
    // Event times closer than this to a grid point are snapped to it.
    const double snap = 1e-9 * dt;
    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * dt;
        const SwingPhase ph = phase_at(t + snap);
        const Derivative d0 = swing_rhs(k, curve_for(ph), x);
        trace.samples.push_back({t, x, d0.p_o, ph});
        if (n == steps) break;
        if (stop && t >= t_clear && x.delta > stop->uep && x.omega > 0.0) break;

        // Split the step at any event strictly inside it.
        std::array<double, 4> cuts{t, 0.0, 0.0, 0.0};
        std::size_t ncuts = 1;
        for (double te : {t_on, t_clear}) {
            if (te > t + snap && te < t + dt - snap && te != cuts[ncuts - 1]) cuts[ncuts++] = te;
        }
        cuts[ncuts++] = t + dt;

        for (std::size_t c = 0; c + 1 < ncuts; ++c) {
            const double a = cuts[c];
            const double h = cuts[c + 1] - a;
            const PowerCurve& curve = curve_for(phase_at(a + snap));
            const Derivative k1 = (c == 0) ? d0 : swing_rhs(k, curve, x);
            const Derivative k2 = swing_rhs(k, curve, {x.delta + 0.5 * h * k1.d_delta, x.omega + 0.5 * h * k1.d_omega});
            const Derivative k3 = swing_rhs(k, curve, {x.delta + 0.5 * h * k2.d_delta, x.omega + 0.5 * h * k2.d_omega});
            const Derivative k4 = swing_rhs(k, curve, {x.delta + h * k3.d_delta, x.omega + h * k3.d_omega});
            SwingState next{x.delta + h / 6.0 * (k1.d_delta + 2.0 * k2.d_delta + 2.0 * k3.d_delta + k4.d_delta),
                            x.omega + h / 6.0 * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega)};
            if (!finite(next)) throw DivergenceError("swing state diverged after t = " + std::to_string(a), a);
            x = next;
        }
    }
    return trace;
}

Verdict classify_stability(SwingTrace& trace, std::optional<double> uep, std::optional<double> sep,
                           double clearing_time, double band) {
    trace.first_uep_crossing.reset();
    trace.verdict = Verdict::Unstable;
    if (!sep || trace.samples.empty()) return trace.verdict;

    if (uep) {
        for (const auto& s : trace.samples) {
            if (s.t < clearing_time) continue;
            if (s.state.delta > *uep && s.state.omega > 0.0) {
                trace.first_uep_crossing = s.t;
                return trace.verdict;
            }
        }
    }
    const double final_delta = trace.samples.back().state.delta;
    if (std::abs(final_delta - *sep) <= band) trace.verdict = Verdict::Stable;
    return trace.verdict;
}

namespace {

// Periodic Catmull-Rom interpolation of a curve sampled on delta_grid(n).
class PeriodicCubic {
public:
    explicit PeriodicCubic(std::vector<double> values) : y_(std::move(values)), h_(kTwoPi / static_cast<double>(y_.size())) {}

    double operator()(double delta) const {
        const auto n = static_cast<long>(y_.size());
        // Grid index k sits at -pi + (k + 1) h.
        const double u = (wrap_angle(delta) + kPi) / h_ - 1.0;
        const double fl = std::floor(u);
        const double s = u - fl;
        const long i = static_cast<long>(fl);
        auto at = [&](long j) { return y_[static_cast<std::size_t>(((j % n) + n) % n)]; };
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)));
    }

private:
    std::vector<double> y_;
    double h_;
};

}  // namespace

PowerCurve make_power_curve(const Scenario& scenario) {
    if (scenario.solver.curve_mode == CurveMode::Exact) {
        return [s = scenario](double delta) { return operating_point(s, delta).p_total; };
    }
    const PdeltaCurve curve = p_delta_curve(scenario, scenario.solver.delta_points);
    std::vector<double> values;
    values.reserve(curve.points.size());
    for (const auto& op : curve.points) values.push_back(op.p_total);
    return PeriodicCubic(std::move(values));
}

SwingSetup make_swing_setup(const Scenario& scenario) {
    scenario.validate();
    const Scenario healthy = scenario.with_fault({FaultKind::None, 0.0});
    const PdeltaCurve pre_curve = p_delta_curve(healthy, scenario.solver.delta_points);
    const EquilibriumPair eq = principal_equilibria(find_equilibria(pre_curve, scenario.converter.p_ref));
    if (!eq.sep) throw SolverFailure("pre-fault P-delta curve has no stable equilibrium at p_ref");

    SwingSetup setup{SwingConstants::from(scenario.converter), make_power_curve(healthy),
                     make_power_curve(scenario), {}, *eq.sep, eq.uep};
    setup.post = setup.pre;
    return setup;
}

SwingTrace run_clearing(const Scenario& scenario, const SwingSetup& setup, double fault_duration,
                        double settle, bool stop_early) {
    const EventTimeline timeline{scenario.solver.fault_on, fault_duration,
                                 scenario.solver.fault_on + fault_duration + settle};
    std::optional<StopAtUep> stop;
    if (stop_early && setup.uep) stop = StopAtUep{*setup.uep};
    SwingTrace trace = integrate_swing(setup.constants, setup.pre, setup.fault, setup.post, timeline,
                                       {setup.sep, 0.0}, scenario.solver.swing_dt, stop);
    classify_stability(trace, setup.uep, setup.sep, timeline.clearing_time(), scenario.solver.settle_band);
    return trace;
}

CctResult critical_clearing_time(const Scenario& scenario, double resolution, double horizon) {
    if (!(resolution > 0.0)) throw ContractViolation("CCT resolution must be > 0");
    if (!(horizon > 0.0)) throw ContractViolation("CCT horizon must be > 0");
    const SwingSetup setup = make_swing_setup(scenario);

    CctResult result;
    result.resolution = resolution;
    result.pre_fault_sep = setup.sep;
    result.post_fault_uep = setup.uep;

    std::map<long, Verdict> seen;
    auto evaluate = [&](const std::vector<long>& indices) {
        std::vector<long> todo;
        for (long i : indices) {
            if (!seen.contains(i)) todo.push_back(i);
        }
        std::vector<Verdict> verdicts(todo.size());
        parallel_for(todo.size(), [&](std::size_t j) {
            verdicts[j] = run_clearing(scenario, setup, static_cast<double>(todo[j]) * resolution, horizon, true).verdict;
        });
        for (std::size_t j = 0; j < todo.size(); ++j) seen[todo[j]] = verdicts[j];
    };

    const long top = static_cast<long>(std::floor(horizon / resolution + 1e-9));
    evaluate({0, top});
    if (seen[top] == Verdict::Stable) {
        result.cct.reset();
    } else if (seen[0] == Verdict::Unstable) {
        result.cct = 0.0;
    } else {
        // k-section on the grid index: lo is Stable, hi is Unstable.
        long lo = 0;
        long hi = top;
        const long width = std::max<long>(1, static_cast<long>(worker_count()));
        while (hi - lo > 1) {
            std::vector<long> probes;
            for (long w = 1; w <= width; ++w) {
                const long p = lo + (hi - lo) * w / (width + 1);
                if (p > lo && p < hi && (probes.empty() || probes.back() != p)) probes.push_back(p);
            }
            if (probes.empty()) probes.push_back(lo + (hi - lo) / 2);
            evaluate(probes);
            for (long p : probes) {
                if (seen[p] == Verdict::Stable) lo = std::max(lo, p);
            }
            for (long p : probes) {
                if (seen[p] == Verdict::Unstable && p > lo) hi = std::min(hi, p);
            }
        }
        result.cct = static_cast<double>(lo) * resolution;
    }

    long lowest_unstable = top + 1;
    for (const auto& [i, v] : seen) {
        result.runs.push_back({static_cast<double>(i) * resolution, v});
        if (v == Verdict::Unstable) lowest_unstable = std::min(lowest_unstable, i);
    }
    for (const auto& [i, v] : seen) {
        if (v == Verdict::Stable && i > lowest_unstable) result.monotonicity_violations.push_back(static_cast<double>(i) * resolution);
    }
    return result;
}

}  // namespace gfm
