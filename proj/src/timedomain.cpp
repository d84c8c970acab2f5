#include "gfm/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "gfm/errors.hpp"
#include "gfm/limiter.hpp"
#include "gfm/power_angle.hpp"

namespace gfm {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

constexpr double kSqrt3 = 1.7320508075688772;

Vec3 to_vec(const ThreePhase& x) { return {x.a, x.b, x.c}; }
ThreePhase to_phases(const Vec3& v) { return {v[0], v[1], v[2]}; }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 remove_mean(const Vec3& v) {
    const double m = (v[0] + v[1] + v[2]) / 3.0;
    return {v[0] - m, v[1] - m, v[2] - m};
}

// Solves a small dense system by Gaussian elimination with partial pivoting.
template <std::size_t N>
std::array<double, N> solve_small(std::array<std::array<double, N>, N> a, std::array<double, N> b, std::size_t n = N) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-300) throw SingularNetworkError("singular fault-node equations");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Orthonormal directions of the fault conductance matrix at the fault node.
enum class Conductance { Infinite, Finite, Zero };
struct Direction {
    Vec3 u;
    Conductance type;
    double g;
};

std::vector<Direction> fault_directions(const FaultSpec& f) {
    const double inv_s2 = 1.0 / std::sqrt(2.0);
    const Vec3 ea{1, 0, 0}, eb{0, 1, 0}, ec{0, 0, 1};
    const bool solid = f.r_f == 0.0;
    auto faulted = [&](const Vec3& u, double g) {
        return Direction{u, solid ? Conductance::Infinite : Conductance::Finite, solid ? 0.0 : g};
    };
    const double g = solid ? 0.0 : 1.0 / f.r_f;
    switch (f.kind) {
        case FaultKind::None:
            return {{ea, Conductance::Zero, 0}, {eb, Conductance::Zero, 0}, {ec, Conductance::Zero, 0}};
        case FaultKind::SLG:
            return {faulted(ea, g), {eb, Conductance::Zero, 0}, {ec, Conductance::Zero, 0}};
        case FaultKind::DLG:
            return {{ea, Conductance::Zero, 0}, faulted(eb, g), faulted(ec, g)};
        case FaultKind::LL:
            return {{ea, Conductance::Zero, 0},
                    faulted({0, inv_s2, -inv_s2}, 2.0 * g),
                    {{0, inv_s2, inv_s2}, Conductance::Zero, 0}};
    }
    return {};
}

struct Params {
    double wn, r1, l1, r2, l2, cf, vg;
};

// Circuit state: converter current, capacitor voltage and converter-side line current as alpha-beta
// space vectors (three-wire, no zero sequence); grid-side line current per phase.
// lag_pos / lag_neg are the converter current in the positive and negative synchronous frames
// (first-order current loop only).
struct Circuit {
    Phasor lag_pos{};
    Phasor lag_neg{};
    Phasor v_c{};
    Phasor i_1{};
    Vec3 i_2{};
};

struct CircuitRate {
    Phasor d_lag_pos{};
    Phasor d_lag_neg{};
    Phasor d_v_c{};
    Phasor d_i_1{};
    Vec3 d_i_2{};
};

Circuit axpy(const Circuit& x, double h, const CircuitRate& k) {
    Circuit y = x;
    y.lag_pos += h * k.d_lag_pos;
    y.lag_neg += h * k.d_lag_neg;
    y.v_c += h * k.d_v_c;
    y.i_1 += h * k.d_i_1;
    for (int p = 0; p < 3; ++p) y.i_2[p] += h * k.d_i_2[p];
    return y;
}

// Algebraic fault-node voltage for one fault stage.
class FaultNode {
public:
    FaultNode(const FaultSpec& f, const Params& p) : p_(p), dirs_(fault_directions(f)) {
        for (std::size_t r = 0; r < 3; ++r) {
            const Direction& d = dirs_[r];
            if (d.type == Conductance::Zero) {
                // u^T (P / L1 + I / L2) v_F
                for (std::size_t c = 0; c < 3; ++c) {
                    Vec3 col{};
                    col[c] = 1.0;
                    const Vec3 pcol = remove_mean(col);
                    a_[r][c] = dot(d.u, pcol) / p_.l1 + dot(d.u, col) / p_.l2;
                }
            } else {
                a_[r] = d.u;
            }
        }
    }

    Vec3 voltage(const Vec3& v_cap, const Vec3& i1, const Vec3& i2, const Vec3& v_g) const {
        Vec3 rhs{};
        for (std::size_t r = 0; r < 3; ++r) {
            const Direction& d = dirs_[r];
            switch (d.type) {
                case Conductance::Infinite: rhs[r] = 0.0; break;
                case Conductance::Finite: {
                    Vec3 diff{i1[0] - i2[0], i1[1] - i2[1], i1[2] - i2[2]};
                    rhs[r] = dot(d.u, diff) / d.g;
                    break;
                }
                case Conductance::Zero: {
                    Vec3 t{};
                    for (int k = 0; k < 3; ++k) {
                        t[k] = (v_cap[k] - p_.r1 * i1[k]) / p_.l1 + (v_g[k] + p_.r2 * i2[k]) / p_.l2;
                    }
                    rhs[r] = dot(d.u, t);
                    break;
                }
            }
        }
        return solve_small<3>(a_, rhs);
    }

    // Flux-conserving projection of the line currents onto this stage's KCL constraints.
    void project(Circuit& x) const {
        std::vector<Vec3> u;
        for (const auto& d : dirs_) {
            if (d.type == Conductance::Zero) u.push_back(d.u);
        }
        if (u.empty()) return;
        const ThreePhase i1p = inverse_clarke(x.i_1);
        const Vec3 i1 = to_vec(i1p);
        const std::size_t m = u.size();
        std::array<std::array<double, 3>, 3> a{};
        std::array<double, 3> r{};
        for (std::size_t i = 0; i < m; ++i) {
            const Vec3 pu = remove_mean(u[i]);
            for (std::size_t j = 0; j < m; ++j) {
                a[i][j] = dot(u[j], pu) / p_.l1 + dot(u[j], u[i]) / p_.l2;
            }
            r[i] = dot(u[i], {i1[0] - x.i_2[0], i1[1] - x.i_2[1], i1[2] - x.i_2[2]});
        }
        const auto w = solve_small<3>(a, r, m);
        Vec3 uw{};
        for (std::size_t i = 0; i < m; ++i) {
            for (int k = 0; k < 3; ++k) uw[k] += u[i][k] * w[i];
        }
        const Vec3 puw = remove_mean(uw);
        Vec3 new_i1{};
        for (int k = 0; k < 3; ++k) {
            new_i1[k] = i1[k] - puw[k] / p_.l1;
            x.i_2[k] += uw[k] / p_.l2;
        }
        x.i_1 = clarke(to_phases(new_i1));
    }

private:
    Params p_;
    std::vector<Direction> dirs_;
    Mat3 a_{};
};

Vec3 grid_voltage(double vg, double wt) {
    return {vg * std::cos(wt), vg * std::cos(wt - kTwoPi / 3.0), vg * std::cos(wt + kTwoPi / 3.0)};
}

bool finite(const Circuit& x) {
    return is_finite(x.lag_pos) && is_finite(x.lag_neg) && is_finite(x.v_c) && is_finite(x.i_1) && std::isfinite(x.i_2[0]) &&
           std::isfinite(x.i_2[1]) && std::isfinite(x.i_2[2]);
}

}  // namespace

Phasor clarke(const ThreePhase& x) {
    return {(2.0 * x.a - x.b - x.c) / 3.0, (x.b - x.c) / kSqrt3};
}

ThreePhase inverse_clarke(Phasor ab) {
    const double a = ab.real();
    const double b = ab.imag();
    return {a, -0.5 * a + 0.5 * kSqrt3 * b, -0.5 * a - 0.5 * kSqrt3 * b};
}

DsogiOutput dsogi_extract(const DsogiState& state, const ThreePhase& x, double omega_ff, double dt, double theta) {
    // Bilinear transform with the centre frequency prewarped so the response is exact at omega_ff.
    const double w = 2.0 / dt * std::tan(0.5 * omega_ff * dt);
    const double k = kDsogiGain;
    const double h = 0.5 * dt;
    // (I - A h) x+ = (I + A h) x + B h (u + u+), A = [[-k w, -w], [w, 0]], B = [k w, 0].
    const double m00 = 1.0 + k * w * h, m01 = w * h, m10 = -w * h, m11 = 1.0;
    const double det = m00 * m11 - m01 * m10;
    auto step = [&](const std::array<double, 2>& s, double u_prev, double u) {
        const double r0 = (1.0 - k * w * h) * s[0] - w * h * s[1] + k * w * h * (u_prev + u);
        const double r1 = w * h * s[0] + s[1];
        return std::array<double, 2>{(m11 * r0 - m01 * r1) / det, (-m10 * r0 + m00 * r1) / det};
    };
    const Phasor ab = clarke(x);
    DsogiOutput out;
    out.next.alpha = step(state.alpha, state.u_alpha, ab.real());
    out.next.beta = step(state.beta, state.u_beta, ab.imag());
    out.next.u_alpha = ab.real();
    out.next.u_beta = ab.imag();

    const auto& a = out.next.alpha;
    const auto& b = out.next.beta;
    const Phasor pos_ab{0.5 * (a[0] - b[1]), 0.5 * (a[1] + b[0])};
    const Phasor neg_ab{0.5 * (a[0] + b[1]), 0.5 * (b[0] - a[1])};
    out.pos = pos_ab * std::polar(1.0, -theta);
    out.neg = neg_ab * std::polar(1.0, theta);
    return out;
}

DsogiState dsogi_steady_state(Phasor pos, Phasor neg, double theta) {
    const Phasor rot = std::polar(1.0, theta);
    const Phasor za = (pos + std::conj(neg)) * rot;
    const Phasor zb = (Phasor{0, -1} * pos + Phasor{0, 1} * std::conj(neg)) * rot;
    DsogiState s;
    s.alpha = {za.real(), za.imag()};
    s.beta = {zb.real(), zb.imag()};
    const Phasor ab = pos * rot + neg * std::conj(rot);
    s.u_alpha = ab.real();
    s.u_beta = ab.imag();
    return s;
}

SimTrace simulate(const Scenario& scenario, const EventTimeline& timeline, const SimOptions& options) {
    scenario.validate();
    timeline.validate();
    const auto& net = scenario.network;
    const auto& conv = scenario.converter;
    const auto& sol = scenario.solver;
    if (!(net.c_f > 0.0)) throw ValidationError("network.c_f", "> 0 for time-domain simulation", net.c_f);
    if (options.record_every < 1) throw ContractViolation("record_every must be >= 1");
    if (options.current_loop == CurrentLoop::Lag && !(options.current_lag_tau > 0.0)) {
        throw ContractViolation("current_lag_tau must be > 0");
    }

    const Params p{net.omega_n, net.z_g1().real(), net.z_g1().imag(), net.z_g2().real(), net.z_g2().imag(),
                   net.c_f, net.v_g_mag};
    const double dt = sol.sim_dt;
    const double tc = sol.control_dt;
    const auto sub = static_cast<long>(std::llround(tc / dt));
    const auto total_steps = static_cast<long>(std::llround(timeline.horizon / dt));
    const long on_step = std::llround(timeline.fault_on / dt);
    const long off_step = std::llround(timeline.clearing_time() / dt);

    const FaultNode healthy_node(FaultSpec{}, p);
    const FaultNode fault_node(scenario.fault, p);

    // Initial condition: healthy steady state at the starting angle.
    const Scenario healthy = scenario.with_fault({FaultKind::None, 0.0});
    double delta0 = 0.0;
    if (options.frozen_delta) {
        delta0 = *options.frozen_delta;
    } else if (options.initial_delta) {
        delta0 = *options.initial_delta;
    } else {
        const auto eq = principal_equilibria(find_equilibria(p_delta_curve(healthy, sol.delta_points), conv.p_ref));
        if (!eq.sep) throw SolverFailure("no pre-fault stable equilibrium to start from");
        delta0 = *eq.sep;
    }
    const OperatingPoint op0 = operating_point(healthy, delta0);
    const Phasor v_o0 = op0.v_o.pos;
    const Phasor i_g0 = (v_o0 - net.v_g()) / net.z_g();
    const Phasor i_l0 = i_g0 + Phasor{0.0, net.c_f} * v_o0;

    Circuit x;
    x.v_c = v_o0;
    x.i_1 = i_g0;
    x.lag_pos = i_l0 * std::polar(1.0, -delta0);
    x.i_2 = to_vec(inverse_clarke(i_g0));

    double theta = delta0;  // controller angle at the start of the current control interval
    // Filters hold the steady state of the sample one control period before t = 0.
    const double theta_prev = theta - net.omega_n * tc;
    DsogiState v_dsogi = dsogi_steady_state(v_o0 * std::polar(1.0, -theta), 0.0, theta_prev);
    DsogiState i_dsogi = dsogi_steady_state(i_g0 * std::polar(1.0, -theta), 0.0, theta_prev);
    // Power loop at rest: the filter output equals the set point.
    double p_filt = conv.p_ref;
    double omega = 0.0;
    Phasor integ_pos{}, integ_neg{};
    Phasor ref_pos = i_l0 * std::polar(1.0, -theta);
    Phasor ref_neg{};
    double c = 1.0;
    Phasor est_v_pos = v_o0 * std::polar(1.0, -theta), est_v_neg{};
    const double lpf = 1.0 - std::exp(-conv.omega_c * tc);
    const Phasor j{0.0, 1.0};

    SimTrace trace;
    trace.omega_n = net.omega_n;
    trace.dt = dt * options.record_every;
    const auto expected = static_cast<std::size_t>(total_steps / options.record_every + 1);
    trace.t.reserve(expected);

    const FaultNode* node = &healthy_node;
    double theta_rate = net.omega_n * (1.0 + omega);
    double t_ctrl = 0.0;

    auto angle_at = [&](double t) { return theta + theta_rate * (t - t_ctrl); };
    auto line_current = [&](const Circuit& s, double t) {
        const Phasor rot = std::polar(1.0, angle_at(t));
        return options.current_loop == CurrentLoop::Ideal ? ref_pos * rot + ref_neg * std::conj(rot)
                                                         : s.lag_pos * rot + s.lag_neg * std::conj(rot);
    };

    auto rate = [&](const Circuit& s, double t) {
        const Phasor i_l = line_current(s, t);
        const Vec3 v_cap = to_vec(inverse_clarke(s.v_c));
        const Vec3 i1 = to_vec(inverse_clarke(s.i_1));
        const Vec3 v_g = grid_voltage(p.vg, p.wn * t);
        const Vec3 v_f = node->voltage(v_cap, i1, s.i_2, v_g);
        const Vec3 pv_f = remove_mean(v_f);
        CircuitRate k;
        k.d_v_c = p.wn / p.cf * (i_l - s.i_1);
        Vec3 d1{};
        for (int q = 0; q < 3; ++q) {
            d1[q] = p.wn / p.l1 * (v_cap[q] - pv_f[q] - p.r1 * i1[q]);
            k.d_i_2[q] = p.wn / p.l2 * (v_f[q] - v_g[q] - p.r2 * s.i_2[q]);
        }
        k.d_i_1 = clarke(to_phases(d1));
        if (options.current_loop == CurrentLoop::Lag) {
            k.d_lag_pos = (ref_pos - s.lag_pos) / options.current_lag_tau;
            k.d_lag_neg = (ref_neg - s.lag_neg) / options.current_lag_tau;
        }
        return k;
    };

    auto record = [&](double t) {
        const Phasor i_l = line_current(x, t);
        const Vec3 v_cap = to_vec(inverse_clarke(x.v_c));
        const Vec3 i1 = to_vec(inverse_clarke(x.i_1));
        const Vec3 v_f = node->voltage(v_cap, i1, x.i_2, grid_voltage(p.vg, p.wn * t));
        // No zero-sequence current flows between the PCC and the fault node.
        const double v0 = (v_f[0] + v_f[1] + v_f[2]) / 3.0;
        trace.t.push_back(t);
        trace.v_o.push_back({v_cap[0] + v0, v_cap[1] + v0, v_cap[2] + v0});
        const ThreePhase i_abc = inverse_clarke(i_l);
        trace.i_o.push_back(i_abc);
        trace.p_inst.push_back((x.v_c * std::conj(i_l)).real());
        trace.c.push_back(c);
        const double th = angle_at(t);
        trace.theta_ref.push_back(th);
        trace.delta.push_back(th - p.wn * t);
        trace.omega.push_back(omega);
        trace.v_pos_est.push_back(est_v_pos);
        trace.v_neg_est.push_back(est_v_neg);
        trace.i_pos_ref.push_back(ref_pos);
        trace.i_neg_ref.push_back(ref_neg);
    };

    auto control = [&](double t) {
        // Angle at this control instant.
        const Phasor i_l_now = line_current(x, t);
        const double theta_new = options.frozen_delta ? p.wn * t + *options.frozen_delta : angle_at(t);
        if (options.current_loop == CurrentLoop::Lag) {
            // Re-express the lag states in the frames of the new control interval.
            const Phasor shift = std::polar(1.0, angle_at(t) - theta_new);
            x.lag_pos *= shift;
            x.lag_neg *= std::conj(shift);
        }
        theta = theta_new;
        t_ctrl = t;

        const DsogiOutput vm = dsogi_extract(v_dsogi, inverse_clarke(x.v_c), p.wn, tc, theta);
        const DsogiOutput im = dsogi_extract(i_dsogi, inverse_clarke(x.i_1), p.wn, tc, theta);
        v_dsogi = vm.next;
        i_dsogi = im.next;
        est_v_pos = vm.pos;
        est_v_neg = vm.neg;

        // Voltage loops with current feedforward; integrators held at zero while limiting.
        const Phasor e_pos = conv.e_ref_mag - vm.pos;
        const Phasor e_neg = -vm.neg;
        const Phasor ff_pos = im.pos + j * p.cf * vm.pos;
        const Phasor ff_neg = im.neg - j * p.cf * vm.neg;
        auto references = [&] {
            return std::pair{conv.k_pv * e_pos + integ_pos + ff_pos, conv.k_pv * e_neg + integ_neg + ff_neg};
        };
        auto [raw_pos, raw_neg] = references();
        LimiterResult lim = options.decoupled_priority
                                ? limit_decoupled(raw_pos, raw_neg, conv.i_lim, *options.decoupled_priority)
                                : limit_coupled(raw_pos, raw_neg, conv.i_lim, conv.k_pv);
        if (lim.c_pos < 1.0 || lim.c_neg < 1.0) {
            integ_pos = integ_neg = 0.0;
            std::tie(raw_pos, raw_neg) = references();
            lim = options.decoupled_priority
                      ? limit_decoupled(raw_pos, raw_neg, conv.i_lim, *options.decoupled_priority)
                      : limit_coupled(raw_pos, raw_neg, conv.i_lim, conv.k_pv);
        } else {
            integ_pos += conv.k_iv * tc * e_pos;
            integ_neg += conv.k_iv * tc * e_neg;
        }
        ref_pos = lim.limited_pos;
        ref_neg = lim.limited_neg;
        c = std::min(lim.c_pos, lim.c_neg);

        // Power-synchronization loop.
        if (!options.frozen_delta) {
            const double p_meas = (x.v_c * std::conj(i_l_now)).real();
            p_filt += lpf * (p_meas - p_filt);
            omega = conv.k_apc * (conv.p_ref - p_filt);
        }
        theta_rate = p.wn * (1.0 + omega);
    };

    for (long n = 0;; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (n == on_step && timeline.fault_duration > 0.0) node = &fault_node;
        if (n == off_step && node != &healthy_node) {
            node = &healthy_node;
            healthy_node.project(x);
        }
        if (n % sub == 0) control(t);
        if (n % options.record_every == 0) {
            record(t);
            const double zs = std::abs(trace.i_o.back().sum());
            trace.max_zero_sum = std::max(trace.max_zero_sum, zs);
        }
        if (n == total_steps) break;

        const CircuitRate k1 = rate(x, t);
        const CircuitRate k2 = rate(axpy(x, 0.5 * dt, k1), t + 0.5 * dt);
        const CircuitRate k3 = rate(axpy(x, 0.5 * dt, k2), t + 0.5 * dt);
        const CircuitRate k4 = rate(axpy(x, dt, k3), t + dt);
        Circuit next = x;
        next.lag_pos += dt / 6.0 * (k1.d_lag_pos + 2.0 * k2.d_lag_pos + 2.0 * k3.d_lag_pos + k4.d_lag_pos);
        next.lag_neg += dt / 6.0 * (k1.d_lag_neg + 2.0 * k2.d_lag_neg + 2.0 * k3.d_lag_neg + k4.d_lag_neg);
        next.v_c += dt / 6.0 * (k1.d_v_c + 2.0 * k2.d_v_c + 2.0 * k3.d_v_c + k4.d_v_c);
        next.i_1 += dt / 6.0 * (k1.d_i_1 + 2.0 * k2.d_i_1 + 2.0 * k3.d_i_1 + k4.d_i_1);
        for (int q = 0; q < 3; ++q) {
            next.i_2[q] += dt / 6.0 * (k1.d_i_2[q] + 2.0 * k2.d_i_2[q] + 2.0 * k3.d_i_2[q] + k4.d_i_2[q]);
        }
        if (!finite(next) || std::abs(next.v_c) > 1e6 || std::abs(next.i_1) > 1e6) {
            throw DivergenceError("time-domain state diverged after t = " + std::to_string(t), t);
        }
        x = next;
    }
    return trace;
}

Phasor fundamental_phasor(const std::vector<double>& t, const std::vector<double>& x, std::size_t first, double omega,
                          std::size_t last) {
    if (last == 0) last = x.size();
    if (first >= last || last > x.size() || t.size() < last) throw ContractViolation("empty window");
    Phasor acc{};
    for (std::size_t k = first; k < last; ++k) acc += x[k] * std::polar(1.0, -omega * t[k]);
    return 2.0 * acc / static_cast<double>(last - first);
}

namespace {

struct Window {
    std::size_t first;
    std::size_t last;
};

// Sample range holding a whole number of `period`s (as close as the grid allows) ending at `end`.
Window window_of(const SimTrace& trace, double window, double period, std::optional<double> end) {
    if (trace.size() < 2) throw ContractViolation("trace too short");
    std::size_t last = trace.size();
    if (end) {
        const auto k = static_cast<std::size_t>(std::llround((*end - trace.t.front()) / trace.dt));
        last = std::min(trace.size(), k + 1);
    }
    const double periods = std::max(1.0, std::floor(window / period + 1e-9));
    const auto samples = static_cast<std::size_t>(std::llround(periods * period / trace.dt));
    if (samples < 2 || samples > last) throw ContractViolation("window longer than the recorded span");
    return {last - samples, last};
}

}  // namespace

SteadyPower steady_state_power(const SimTrace& trace, double window, std::optional<double> end) {
    const double period_2w = kPi / trace.omega_n;
    const auto [first, last] = window_of(trace, window, period_2w, end);
    const std::size_t half = first + (last - first) / 2;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = first; k < half; ++k) s1 += trace.p_inst[k];
    for (std::size_t k = half; k < last; ++k) s2 += trace.p_inst[k];
    const double m1 = s1 / static_cast<double>(half - first);
    const double m2 = s2 / static_cast<double>(last - half);
    SteadyPower out;
    out.p_dc = (s1 + s2) / static_cast<double>(last - first);
    if (std::abs(m1 - m2) > 0.01 * std::max(std::abs(out.p_dc), 1e-2)) {
        throw NotSettledError("instantaneous power drifts by " + std::to_string(std::abs(m1 - m2)) +
                              " pu across the window");
    }
    out.p_2w_amp = std::abs(fundamental_phasor(trace.t, trace.p_inst, first, 2.0 * trace.omega_n, last));
    return out;
}

MeasuredSequences measure_sequences(const SimTrace& trace, double window, std::optional<double> end) {
    const double period = kTwoPi / trace.omega_n;
    const auto [first, last] = window_of(trace, window, period, end);
    auto component = [&](const std::vector<ThreePhase>& w, double ThreePhase::*m) {
        std::vector<double> x(last);
        for (std::size_t k = first; k < last; ++k) x[k] = w[k].*m;
        return fundamental_phasor(trace.t, x, first, trace.omega_n, last);
    };
    const Phasor a = std::polar(1.0, kTwoPi / 3.0);
    auto sequences = [&](const std::vector<ThreePhase>& w) {
        const Phasor xa = component(w, &ThreePhase::a);
        const Phasor xb = component(w, &ThreePhase::b);
        const Phasor xc = component(w, &ThreePhase::c);
        return std::tuple{SequenceSet{(xa + a * xb + a * a * xc) / 3.0, (xa + a * a * xb + a * xc) / 3.0,
                                      (xa + xb + xc) / 3.0},
                          std::max({std::abs(xa), std::abs(xb), std::abs(xc)})};
    };
    MeasuredSequences out;
    std::tie(out.v, std::ignore) = sequences(trace.v_o);
    std::tie(out.i, out.max_phase_peak) = sequences(trace.i_o);
    return out;
}

}  // namespace gfm
