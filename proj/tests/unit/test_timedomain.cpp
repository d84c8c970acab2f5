#include "catch_amalgamated.hpp"

#include "gfm/errors.hpp"
#include "gfm/power_angle.hpp"
#include "gfm/timedomain.hpp"

using namespace gfm;
using Catch::Approx;

namespace {

const Phasor kA = std::polar(1.0, kTwoPi / 3.0);
constexpr double kW = kTwoPi * 60.0;

// Phase values of Fortescue phasors (phase-a reference) at angle wt.
ThreePhase phases(const SequenceSet& x, double wt) {
    const Phasor rot = std::polar(1.0, wt);
    return {((x.pos + x.neg + x.zero) * rot).real(), ((x.pos * kA * kA + x.neg * kA + x.zero) * rot).real(),
            ((x.pos * kA + x.neg * kA * kA + x.zero) * rot).real()};
}

SimTrace synthesized(const SequenceSet& v, const SequenceSet& i, double seconds, double dt) {
    SimTrace tr;
    tr.dt = dt;
    tr.omega_n = kW;
    const auto n = static_cast<std::size_t>(std::llround(seconds / dt));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = dt * static_cast<double>(k);
        tr.t.push_back(t);
        tr.v_o.push_back(phases(v, kW * t));
        tr.i_o.push_back(phases(i, kW * t));
        tr.p_inst.push_back((clarke(tr.v_o.back()) * std::conj(clarke(tr.i_o.back()))).real());
    }
    return tr;
}

void check_dsogi(Phasor pos, Phasor neg) {
    const double dt = 1e-4;
    DsogiState st;
    DsogiOutput out;
    for (int k = 0; k <= 1000; ++k) {
        const double th = kW * dt * k + 0.3;
        const Phasor ab = pos * std::polar(1.0, th) + neg * std::polar(1.0, -th);
        out = dsogi_extract(st, inverse_clarke(ab), kW, dt, th);
        st = out.next;
    }
    CHECK(std::abs(out.pos - pos) < 1e-3);
    CHECK(std::abs(out.neg - neg) < 1e-3);
}

Scenario calibrated() {
    Scenario s;
    s.network.split = 0.7;
    s.fault = {FaultKind::SLG, 0.0};
    s.solver.fault_model = FaultModel::Consistent;
    return s;
}

}  // namespace

TEST_CASE("Clarke transform", "[timedomain]") {
    const ThreePhase x{0.7, -0.2, 0.4};
    const ThreePhase y = inverse_clarke(clarke(x));
    const double zero = (x.a + x.b + x.c) / 3.0;
    CHECK(y.a == Approx(x.a - zero));
    CHECK(y.b == Approx(x.b - zero));
    CHECK(y.c == Approx(x.c - zero));
    CHECK(std::abs(y.sum()) < 1e-15);
    CHECK(std::abs(clarke({1.0, 1.0, 1.0})) < 1e-15);
    // Amplitude invariance: a balanced set of peak 1 maps to a unit vector.
    CHECK(std::abs(clarke(phases({std::polar(1.0, 0.4), 0.0, 0.0}, 0.0))) == Approx(1.0));
}

TEST_CASE("DSOGI sequence extraction", "[timedomain]") {
    check_dsogi({1.0, 0.0}, {0.0, 0.0});
    check_dsogi({0.0, 0.0}, {1.0, 0.0});
    check_dsogi(std::polar(0.8, deg2rad(10.0)), std::polar(0.3, deg2rad(-40.0)));
    // Steady-state initialization needs no settling at all.
    const Phasor pos = std::polar(0.9, 0.2), neg = std::polar(0.25, -1.0);
    const double dt = 1e-4;
    DsogiState st = dsogi_steady_state(pos, neg, 0.5 - kW * dt);
    const Phasor ab = pos * std::polar(1.0, 0.5) + neg * std::polar(1.0, -0.5);
    const auto out = dsogi_extract(st, inverse_clarke(ab), kW, dt, 0.5);
    CHECK(std::abs(out.pos - pos) < 1e-12);
    CHECK(std::abs(out.neg - neg) < 1e-12);
}

TEST_CASE("steady-state power of synthesized waveforms", "[timedomain]") {
    const double dt = 1.0 / (60.0 * 240.0);
    SECTION("balanced") {
        const SequenceSet v{std::polar(1.0, 0.1), 0.0, 0.0};
        const SequenceSet i{std::polar(0.8, -0.3), 0.0, 0.0};
        const auto p = steady_state_power(synthesized(v, i, 0.3, dt), 0.2);
        CHECK(p.p_dc == Approx((v.pos * std::conj(i.pos)).real()).epsilon(1e-12));
        CHECK(p.p_2w_amp < 1e-12);
    }
    SECTION("unbalanced") {
        const SequenceSet v{std::polar(0.9, 0.2), std::polar(0.25, -0.7), 0.0};
        const SequenceSet i{std::polar(0.7, -0.4), std::polar(0.35, 1.1), 0.0};
        const auto p = steady_state_power(synthesized(v, i, 0.3, dt), 0.2);
        const double dc = (v.pos * std::conj(i.pos)).real() + (v.neg * std::conj(i.neg)).real();
        const double ac = std::abs(v.pos * i.neg + v.neg * i.pos);
        CHECK(std::abs(p.p_dc - dc) < 1e-6);
        CHECK(std::abs(p.p_2w_amp - ac) < 1e-6);
        const auto m = measure_sequences(synthesized(v, i, 0.3, dt), 0.2);
        CHECK(std::abs(m.v.pos - v.pos) < 1e-9);
        CHECK(std::abs(m.v.neg - v.neg) < 1e-9);
        CHECK(std::abs(m.i.neg - i.neg) < 1e-9);
        CHECK(std::abs(m.i.zero) < 1e-9);
        CHECK(m.max_phase_peak == Approx(phase_peaks(i.pos, std::conj(i.neg)).max_peak).epsilon(1e-9));
    }
    SECTION("drifting power is rejected") {
        auto tr = synthesized({1.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, 0.3, dt);
        for (std::size_t k = 0; k < tr.size(); ++k) tr.p_inst[k] *= 1.0 + tr.t[k];
        CHECK_THROWS_AS(steady_state_power(tr, 0.2), NotSettledError);
    }
    SECTION("window longer than the trace") {
        const auto tr = synthesized({1.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, 0.1, dt);
        CHECK_THROWS_AS(steady_state_power(tr, 0.5), ContractViolation);
    }
}

TEST_CASE("unfaulted simulation settles at the stable equilibrium", "[timedomain]") {
    Scenario s;
    const auto eq = principal_equilibria(find_equilibria(p_delta_curve(s, 1000), s.converter.p_ref));
    REQUIRE(eq.sep);
    SimOptions opt;
    opt.initial_delta = *eq.sep + 0.1;
    const auto tr = simulate(s, {0.0, 0.0, 6.0}, opt);
    const auto p = steady_state_power(tr, 0.5);
    CHECK(p.p_dc == Approx(0.7).epsilon(0.005));
    CHECK(tr.delta.back() == Approx(*eq.sep).margin(0.01));
    CHECK(tr.max_zero_sum < 1e-9);
}

TEST_CASE("frozen-angle SLG matches the phasor operating point", "[timedomain]") {
    const Scenario s = calibrated();
    const double delta = 0.111;
    SimOptions opt;
    opt.frozen_delta = delta;
    const auto tr = simulate(s, {0.0, 1.0, 1.1}, opt);
    const auto m = measure_sequences(tr, 0.3, 1.0);
    const auto op = operating_point(s, delta);
    REQUIRE(op.limiting);
    CHECK((m.v.pos * std::conj(m.i.pos)).real() == Approx(op.p_pos).epsilon(0.02));
    CHECK((m.v.neg * std::conj(m.i.neg)).real() == Approx(op.p_neg).epsilon(0.02));
    CHECK(m.max_phase_peak == Approx(1.2).epsilon(0.02));
    const auto p = steady_state_power(tr, 0.3, 1.0);
    CHECK(p.p_2w_amp == Approx(op.p_2w_amp).epsilon(0.05));

    // Saturated loops behave as a resistance in both sequences.
    const Phasor e = std::polar(s.converter.e_ref_mag, delta);
    CHECK(std::abs(wrap_angle(phase_of(e - m.v.pos) - phase_of(m.i.pos))) < deg2rad(2.0));
    CHECK(std::abs(wrap_angle(phase_of(-m.v.neg) - phase_of(m.i.neg))) < deg2rad(2.0));
}

TEST_CASE("converter current limit during and after a fault", "[timedomain]") {
    for (FaultKind kind : {FaultKind::SLG, FaultKind::DLG, FaultKind::LL}) {
        Scenario s = calibrated();
        s.fault.kind = kind;
        SimOptions opt;
        opt.record_every = 1;
        const EventTimeline tl{0.1, 0.2, 1.0};
        const auto tr = simulate(s, tl, opt);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            if (tr.t[k] < tl.fault_on + 1.0 / 60.0) continue;
            const auto& i = tr.i_o[k];
            worst = std::max({worst, std::abs(i.a), std::abs(i.b), std::abs(i.c)});
        }
        INFO("fault " << to_string(kind));
        CHECK(worst <= 1.2 * 1.05);
        CHECK(tr.max_zero_sum < 1e-9);
    }
}

TEST_CASE("time-domain clearing verdicts bracket the phasor boundary", "[timedomain]") {
    Scenario s = calibrated();
    auto final_delta = [&](double duration) {
        SimOptions opt;
        opt.record_every = 100;
        return simulate(s, {0.1, duration, 3.0}, opt).delta.back();
    };
    CHECK(std::abs(final_delta(0.20)) < 0.5);
    CHECK(std::abs(final_delta(0.32)) > kTwoPi);
}

TEST_CASE("first-order current loop", "[timedomain]") {
    const Scenario s = calibrated();
    SimOptions opt;
    opt.current_loop = CurrentLoop::Lag;
    opt.frozen_delta = 0.111;
    const auto tr = simulate(s, {0.0, 1.0, 1.1}, opt);
    const auto m = measure_sequences(tr, 0.3, 1.0);
    CHECK(m.max_phase_peak == Approx(1.2).epsilon(0.02));
    CHECK(tr.max_zero_sum < 1e-9);
}

TEST_CASE("simulation argument checks", "[timedomain]") {
    Scenario s = calibrated();
    SimOptions opt;
    opt.record_every = 0;
    CHECK_THROWS_AS(simulate(s, {0.0, 0.1, 0.2}, opt), ContractViolation);
    s.network.c_f = 0.0;
    CHECK_THROWS_AS(simulate(s, {0.0, 0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(simulate(calibrated(), {0.0, 0.3, 0.2}), ValidationError);
}

TEST_CASE("unstable voltage loop reports divergence with a time stamp", "[timedomain]") {
    Scenario s = calibrated();
    s.network.c_f = 0.002;  // far below what a 10 kHz loop with unit gain tolerates
    s.converter.i_lim = 1e9;  // otherwise the limiter bounds the oscillation
    SimOptions opt;
    opt.frozen_delta = 0.1;
    try {
        simulate(s, {0.0, 0.0, 2.0}, opt);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.last_valid_time() > 0.0);
        CHECK(e.last_valid_time() < 2.0);
    }
}
