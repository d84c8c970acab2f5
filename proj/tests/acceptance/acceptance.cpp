// Acceptance run: one PASS/FAIL line per criterion, indented detail lines below it.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gfm/limiter.hpp"
#include "gfm/power_angle.hpp"
#include "gfm/scenario_io.hpp"
#include "gfm/swing.hpp"
#include "gfm/timedomain.hpp"

using namespace gfm;

namespace {

// Pinned tolerances and budgets.
constexpr double kIdentityTol = 1e-10;
constexpr double kLimitTol = 1e-8;
constexpr double kOracleTol = 1e-6;
constexpr double kCctLo = 0.25, kCctHi = 0.28, kCctResolution = 1e-3;
constexpr double kPnegLo = -0.20, kPnegHi = -0.10;
constexpr double kConsistencyTol = 0.02;
constexpr double kRk4Ratio = 14.0;
constexpr double kDsogiTol = 1e-3;
constexpr double kZeroSumTol = 1e-9;
constexpr double kBudget1 = 5.0, kBudget3 = 10.0, kBudget4 = 300.0, kBudget6 = 120.0;

const FaultKind kKinds[] = {FaultKind::SLG, FaultKind::DLG, FaultKind::LL};

int failures = 0;
double worst_zero_sum = 0.0;

void verdict(int n, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... A>
void info(const char* fmt, A... a) {
    std::printf("    ");
    std::printf(fmt, a...);
    std::printf("\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario faulted(double split, FaultKind kind, double r_f) {
    Scenario s;
    s.network.split = split;
    s.fault = {kind, r_f};
    return s;
}

double curve_max(const PdeltaCurve& c) {
    double m = -1e300;
    for (const auto& p : c.points) m = std::max(m, p.p_total);
    return m;
}

struct SweepCurve {
    Scenario scenario;
    PdeltaCurve curve;
};

// Criteria 1, 2 and the limiter half of 3 share the same curves, built for both fault models.
std::vector<SweepCurve> criterion_1_and_2() {
    std::vector<SweepCurve> curves;
    const auto t0 = std::chrono::steady_clock::now();
    for (FaultModel model : {FaultModel::AsPrinted, FaultModel::Consistent}) {
        for (FaultKind kind : kKinds) {
            for (double r_f : {0.0, 0.05, 0.2}) {
                for (double split : {0.3, 0.5, 0.7}) {
                    Scenario s = faulted(split, kind, r_f);
                    s.solver.fault_model = model;
                    curves.push_back({s, p_delta_curve(s, 1000)});
                }
            }
        }
    }
    const double elapsed = seconds_since(t0) / 2.0;  // per fault model

    double worst_neg[2] = {-1e300, -1e300};
    double worst_pos_id[2] = {0.0, 0.0}, worst_neg_id[2] = {0.0, 0.0};
    for (const auto& sc : curves) {
        const int m = sc.scenario.solver.fault_model == FaultModel::AsPrinted ? 0 : 1;
        const auto& net = sc.scenario.network;
        for (const auto& op : sc.curve.points) {
            worst_neg[m] = std::max(worst_neg[m], op.p_neg);
            // Relative to the apparent power of the sequence, which stays finite where P crosses zero.
            const double ref_pos = (op.v_o.pos * std::conj(op.i_o.pos)).real();
            const double ref_neg = (op.v_o.neg * std::conj(op.i_o.neg)).real();
            const double s_pos = std::abs(op.v_o.pos) * std::abs(op.i_o.pos);
            const double s_neg = std::abs(op.v_o.neg) * std::abs(op.i_o.neg);
            if (s_pos > 0.0) {
                const double e = std::abs(active_power_pos(op, net, sc.scenario.converter.e_ref_mag) - ref_pos);
                worst_pos_id[m] = std::max(worst_pos_id[m], e / s_pos);
            }
            if (s_neg > 0.0) {
                worst_neg_id[m] = std::max(worst_neg_id[m], std::abs(active_power_neg(op, net) - ref_neg) / s_neg);
            }
        }
    }
    const char* names[2] = {"as-printed", "consistent"};

    verdict(1, worst_neg[0] <= 0.0 && worst_neg[1] <= 0.0 && elapsed < kBudget1,
            "P- <= 0 at 1000 points for SLG/DLG/LL, r_f {0, 0.05, 0.2}, split {0.3, 0.5, 0.7}");
    for (int m = 0; m < 2; ++m) info("%s fault formulas: largest P- = %.3e pu", names[m], worst_neg[m]);
    info("27 curves in %.2f s per fault model (budget %.0f s)", elapsed, kBudget1);

    bool ok2 = true;
    for (int m = 0; m < 2; ++m) ok2 = ok2 && worst_pos_id[m] < kIdentityTol && worst_neg_id[m] < kIdentityTol;
    verdict(2, ok2, "closed-form sequence powers equal Re(V conj(I)) at every sampled point");
    for (int m = 0; m < 2; ++m) {
        info("%s: worst relative mismatch positive %.2e, negative %.2e (tolerance %.0e)", names[m],
             worst_pos_id[m], worst_neg_id[m], kIdentityTol);
    }
    return curves;
}

void criterion_3(const std::vector<SweepCurve>& curves) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_limit = 0.0;
    std::size_t limited = 0;
    for (const auto& sc : curves) {
        for (const auto& op : sc.curve.points) {
            if (!op.limiting) continue;
            ++limited;
            const double i_max = max_output_current(sc.scenario, op.delta, op.r_eq);
            worst_limit = std::max(worst_limit, std::abs(i_max - sc.scenario.converter.i_lim));
        }
    }

    // Sampling oracle: phase currents of i+ e^{j wt} + i- e^{-j wt} over one period.
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> mag(0.0, 1.5), ang(-kPi, kPi);
    constexpr int kSamples = 100000;
    double worst_oracle = 0.0, worst_phase = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const Phasor ip = std::polar(mag(rng), ang(rng));
        const Phasor in = std::polar(mag(rng), ang(rng));
        const PhasePeaks pk = phase_peaks(ip, in);
        double sampled[3] = {0.0, 0.0, 0.0};
        for (int k = 0; k < kSamples; ++k) {
            const double th = kTwoPi * k / kSamples;
            const Phasor ab = ip * std::polar(1.0, th) + in * std::polar(1.0, -th);
            const ThreePhase x = inverse_clarke(ab);
            sampled[0] = std::max(sampled[0], std::abs(x.a));
            sampled[1] = std::max(sampled[1], std::abs(x.b));
            sampled[2] = std::max(sampled[2], std::abs(x.c));
        }
        const double sampled_max = std::max({sampled[0], sampled[1], sampled[2]});
        if (sampled_max > 1e-9) worst_oracle = std::max(worst_oracle, std::abs(pk.max_peak - sampled_max) / sampled_max);
        // Shift labels {0, -2pi/3, +2pi/3} land on phases a, c, b of the b-lagging waveform.
        const double exact[3] = {pk.peak_a, pk.peak_c, pk.peak_b};
        for (int q = 0; q < 3; ++q) {
            if (exact[q] > 1e-9) worst_phase = std::max(worst_phase, std::abs(exact[q] - sampled[q]) / exact[q]);
        }
    }
    const double elapsed = seconds_since(t0);
    verdict(3, limited > 0 && worst_limit < kLimitTol && worst_oracle < kOracleTol && elapsed < kBudget3,
            "limited peak equals I_lim and peak formula matches waveform sampling");
    info("%zu limiting points, worst |i_max - I_lim| = %.2e pu (tolerance %.0e)", limited, worst_limit, kLimitTol);
    info("1000 random pairs x %d samples, worst relative error of max peak %.2e (tolerance %.0e); %.2f s (budget %.0f s)",
         kSamples, worst_oracle, kOracleTol, elapsed, kBudget3);
    info("per-phase peaks, shift -2pi/3 read as phase c: worst relative error %.2e", worst_phase);
}

struct Calibration {
    double split = 0.0;
    double r_f = 0.0;
    double cct = 0.0;
    bool found = false;
};

Calibration criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    Calibration best;
    info("CCT sweep, SLG, exact P(delta), resolution %.3f s:", kCctResolution);
    for (double split : {0.3, 0.4, 0.5, 0.6, 0.7}) {
        std::string row;
        for (double r_f : {0.0, 0.02, 0.04, 0.06, 0.08, 0.1}) {
            Scenario s = faulted(split, FaultKind::SLG, r_f);
            const CctResult r = critical_clearing_time(s, kCctResolution, s.solver.horizon);
            char cell[48];
            if (r.cct) {
                std::snprintf(cell, sizeof cell, " r_f=%.2f:%.3f", r_f, *r.cct);
                const bool inside = *r.cct >= kCctLo - 1e-12 && *r.cct <= kCctHi + 1e-12;
                if (inside && (!best.found || std::abs(*r.cct - 0.264) < std::abs(best.cct - 0.264))) {
                    best = {split, r_f, *r.cct, true};
                }
            } else {
                std::snprintf(cell, sizeof cell, " r_f=%.2f:unbounded", r_f);
            }
            row += cell;
        }
        info("  split=%.1f%s", split, row.c_str());
    }
    const double elapsed = seconds_since(t0);
    verdict(4, best.found && elapsed < kBudget4,
            best.found ? "CCT in [0.25, 0.28] s: " + fmt("split=%.1f", best.split) + fmt(" r_f=%.2f", best.r_f) +
                             fmt(" cct=%.3f s", best.cct)
                       : std::string("no configuration with CCT in [0.25, 0.28] s"));
    info("sweep of 30 configurations in %.1f s (budget %.0f s)", elapsed, kBudget4);

    // The recorded calibration must be the winner.
    const Scenario recorded = load_scenario(std::string(GFM_SCENARIO_DIR) + "/calibrated_slg.ini").scenario;
    const bool same = best.found && recorded.network.split == best.split && recorded.fault.r_f == best.r_f &&
                      recorded.fault.kind == FaultKind::SLG;
    info("scenarios/calibrated_slg.ini: split=%g r_f=%g (%s the winner)", recorded.network.split,
         recorded.fault.r_f, same ? "matches" : "DOES NOT match");
    if (!same) ++failures;
    return best;
}

void criterion_5(const Calibration& cal) {
    if (!cal.found) {
        verdict(5, false, "no calibrated configuration from criterion 4");
        return;
    }
    const Scenario s = faulted(cal.split, FaultKind::SLG, cal.r_f);
    const SwingSetup setup = make_swing_setup(s);
    const double p_neg = operating_point(s, setup.sep).p_neg;
    verdict(5, p_neg >= kPnegLo && p_neg <= kPnegHi,
            "SLG steady-fault P- in [-0.20, -0.10] pu: " + fmt("%.4f pu", p_neg));
    info("evaluated at the pre-fault SEP %.4f rad under the calibrated fault", setup.sep);

    // Range along the fault-on trajectory of a just-critical clearing.
    const SwingTrace tr = run_clearing(s, setup, cal.cct, s.solver.settle_band, false);
    double lo = 1e300, hi = -1e300;
    for (const auto& smp : tr.samples) {
        if (smp.phase != SwingPhase::Fault) continue;
        const double pn = operating_point(s, smp.state.delta).p_neg;
        lo = std::min(lo, pn);
        hi = std::max(hi, pn);
    }
    info("P- along the fault-on swing up to the CCT: [%.4f, %.4f] pu", lo, hi);
}

struct Comparison {
    double pos_err, neg_err, peak_err, peak;
};

Comparison compare_frozen(const Scenario& s, double delta) {
    SimOptions opt;
    opt.frozen_delta = delta;
    const SimTrace tr = simulate(s, {0.0, 1.0, 1.1}, opt);
    worst_zero_sum = std::max(worst_zero_sum, tr.max_zero_sum);
    const MeasuredSequences m = measure_sequences(tr, 0.3, 1.0);
    const OperatingPoint op = operating_point(s, delta);
    const double p_pos = (m.v.pos * std::conj(m.i.pos)).real();
    const double p_neg = (m.v.neg * std::conj(m.i.neg)).real();
    const double peak_ref = op.limiting ? s.converter.i_lim : max_output_current(s, delta, op.r_eq);
    return {p_pos / op.p_pos - 1.0, p_neg / op.p_neg - 1.0, m.max_phase_peak / peak_ref - 1.0, m.max_phase_peak};
}

void criterion_6(const Calibration& cal) {
    const auto t0 = std::chrono::steady_clock::now();
    const double split = cal.found ? cal.split : 0.7;
    const double r_f = cal.found ? cal.r_f : 0.0;
    const double sep = make_swing_setup(faulted(split, FaultKind::SLG, r_f)).sep;
    bool ok = true;
    for (FaultKind kind : kKinds) {
        Scenario s = faulted(split, kind, r_f);
        s.solver.fault_model = FaultModel::Consistent;
        const Comparison c = compare_frozen(s, sep);
        const bool pass = std::abs(c.pos_err) < kConsistencyTol && std::abs(c.neg_err) < kConsistencyTol &&
                          std::abs(c.peak_err) < kConsistencyTol;
        ok = ok && pass;
        info("%-3s P+ %+.2f%%  P- %+.2f%%  peak %.4f (%+.2f%%)%s", std::string(to_string(kind)).c_str(),
             100 * c.pos_err, 100 * c.neg_err, c.peak, 100 * c.peak_err, pass ? "" : "  <- outside 2%");
    }
    const double elapsed = seconds_since(t0);
    verdict(6, ok && elapsed < kBudget6,
            "frozen-angle simulation matches the phasor point within 2% at the SEP (consistent sequence model)");
    info("split=%.1f r_f=%.2f delta=%.4f rad; %.1f s (budget %.0f s)", split, r_f, sep, elapsed, kBudget6);

    // Not gated: the printed formulas, and a deep angle with small positive-sequence power.
    for (FaultKind kind : kKinds) {
        const Comparison c = compare_frozen(faulted(split, kind, r_f), sep);
        info("as-printed formulas, %-3s: P+ %+.2f%%  P- %+.2f%%  peak %+.2f%%", std::string(to_string(kind)).c_str(),
             100 * c.pos_err, 100 * c.neg_err, 100 * c.peak_err);
    }
    for (FaultKind kind : kKinds) {
        Scenario s = faulted(0.5, kind, 0.05);
        s.solver.fault_model = FaultModel::Consistent;
        const Comparison c = compare_frozen(s, 0.8);
        info("split=0.5 r_f=0.05 delta=0.8, %-3s: P+ %+.2f%%  P- %+.2f%%  peak %+.2f%%",
             std::string(to_string(kind)).c_str(), 100 * c.pos_err, 100 * c.neg_err, 100 * c.peak_err);
    }
}

void criterion_7(const std::vector<SweepCurve>& curves) {
    const Scenario healthy;
    const PdeltaCurve pre = p_delta_curve(healthy, 1000);
    const double pre_max = curve_max(pre);
    const auto eqs = find_equilibria(pre, healthy.converter.p_ref);
    const auto n_sep = std::count_if(eqs.begin(), eqs.end(), [](const Equilibrium& e) { return e.kind == EquilibriumKind::SEP; });
    const auto n_uep = eqs.size() - static_cast<std::size_t>(n_sep);
    double worst_fault_max = -1e300;
    for (const auto& sc : curves) worst_fault_max = std::max(worst_fault_max, curve_max(sc.curve));
    verdict(7, pre_max > healthy.converter.p_ref && worst_fault_max < pre_max && n_sep == 1 && n_uep == 1,
            "pre-fault curve shape, faulted maxima and equilibria");
    info("pre-fault max %.4f pu; largest faulted max %.4f pu over all %zu faulted curves; %zu SEP, %zu UEP", pre_max,
         worst_fault_max, curves.size(), static_cast<std::size_t>(n_sep), n_uep);
    for (const auto& e : eqs) info("  %s at %.5f rad, slope %.3f pu/rad", std::string(to_string(e.kind)).c_str(), e.delta, e.slope);
}

// Closed form of the linearized swing system x' = A x by its complex eigenpairs.
SwingState linear_exact(const SwingConstants& k, double slope, SwingState x0, double t) {
    const double a11 = 0.0, a12 = k.omega_n, a21 = -k.omega_c * k.k_apc * slope, a22 = -k.omega_c;
    const double tr = a11 + a22, det = a11 * a22 - a12 * a21;
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
    const std::complex<double> l1 = tr / 2.0 + disc, l2 = tr / 2.0 - disc;
    // e^{At} = (e^{l1 t}(A - l2 I) - e^{l2 t}(A - l1 I)) / (l1 - l2)
    const std::complex<double> e1 = std::exp(l1 * t), e2 = std::exp(l2 * t);
    auto entry = [&](double aij, bool diag) {
        return ((e1 * (aij - (diag ? l2 : 0.0)) - e2 * (aij - (diag ? l1 : 0.0))) / (l1 - l2)).real();
    };
    const double m11 = entry(a11, true), m12 = entry(a12, false), m21 = entry(a21, false), m22 = entry(a22, true);
    return {m11 * x0.delta + m12 * x0.omega, m21 * x0.delta + m22 * x0.omega};
}

void criterion_8() {
    const Scenario s;
    const SwingConstants k = SwingConstants::from(s.converter);
    const double sep = 0.11, slope = 5.0;
    const PowerCurve lin = [&](double d) { return k.p_ref + slope * (d - sep); };
    const SwingState x0{sep + 0.2, 0.0};
    const double t_end = 1.0;
    auto error = [&](double dt) {
        const SwingTrace tr = integrate_swing(k, lin, lin, lin, {0.0, 0.0, t_end}, x0, dt);
        const SwingState exact = linear_exact(k, slope, {x0.delta - sep, x0.omega}, t_end);
        const SwingState& got = tr.samples.back().state;
        return std::hypot(got.delta - sep - exact.delta, (got.omega - exact.omega) * k.omega_n);
    };
    const double e1 = error(1e-3), e2 = error(5e-4);
    const double ratio = e1 / e2;

    // DSOGI on synthesized unbalanced voltages, 0.1 s from a cold start.
    const double wn = s.network.omega_n, dt = s.solver.control_dt;
    const Phasor pos = std::polar(0.85, 0.3), neg = std::polar(0.3, -1.2);
    DsogiState st;
    DsogiOutput out;
    const int steps = static_cast<int>(std::llround(0.1 / dt));
    for (int n = 0; n <= steps; ++n) {
        const double th = wn * dt * n + 0.7;
        out = dsogi_extract(st, inverse_clarke(pos * std::polar(1.0, th) + neg * std::polar(1.0, -th)), wn, dt, th);
        st = out.next;
    }
    const double dsogi_err = std::max(std::abs(out.pos - pos), std::abs(out.neg - neg));

    // A fault-and-clear run for each kind adds to the zero-sum record.
    for (FaultKind kind : kKinds) {
        Scenario f = faulted(0.7, kind, 0.0);
        SimOptions opt;
        opt.record_every = 1;
        worst_zero_sum = std::max(worst_zero_sum, simulate(f, {0.1, 0.15, 1.0}, opt).max_zero_sum);
    }
    verdict(8, ratio >= kRk4Ratio && dsogi_err < kDsogiTol && worst_zero_sum < kZeroSumTol,
            "RK4 order, DSOGI recovery and zero-sum converter current");
    info("RK4 error %.3e (dt 1e-3) / %.3e (dt 5e-4) = %.2f (need >= %.0f)", e1, e2, ratio, kRk4Ratio);
    info("DSOGI error after 0.1 s: %.2e (tolerance %.0e)", dsogi_err, kDsogiTol);
    info("largest |ia + ib + ic| over all simulations: %.2e (tolerance %.0e)", worst_zero_sum, kZeroSumTol);
}

}  // namespace

int main() {
    try {
        const auto curves = criterion_1_and_2();
        criterion_3(curves);
        const Calibration cal = criterion_4();
        criterion_5(cal);
        criterion_6(cal);
        criterion_7(curves);
        criterion_8();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance run aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "NOT ALL PASS", failures);
    return failures == 0 ? 0 : 1;
}
