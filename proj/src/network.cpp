#include "gfm/network.hpp"

#include <cmath>
#include <string>

#include "gfm/errors.hpp"

namespace gfm {

namespace {

void require_finite_nonneg_r_eq(double r_eq) {
    if (!(r_eq >= 0.0) || !std::isfinite(r_eq)) {
        throw ContractViolation("r_eq must be finite and >= 0, got " + std::to_string(r_eq));
    }
}

Phasor checked_div(Phasor num, Phasor den, const char* what) {
    if (std::abs(den) == 0.0) throw SingularNetworkError(std::string("singular ") + what);
    return num / den;
}

}  // namespace

void NetworkParams::validate() const {
    if (!(std::isfinite(v_g_mag) && v_g_mag >= 0.0)) throw ValidationError("network.v_g_mag", ">= 0", v_g_mag);
    if (!(std::isfinite(x_g) && x_g > 0.0)) throw ValidationError("network.x_g", "> 0", x_g);
    if (!(std::isfinite(r_g) && r_g >= 0.0)) throw ValidationError("network.r_g", ">= 0", r_g);
    if (!(split > 0.0 && split < 1.0)) throw ValidationError("network.split", "lambda in (0,1)", split);
    if (!(std::isfinite(l_f) && l_f > 0.0)) throw ValidationError("network.l_f", "> 0", l_f);
    if (!(std::isfinite(c_f) && c_f >= 0.0)) throw ValidationError("network.c_f", ">= 0", c_f);
    if (!(std::isfinite(omega_n) && omega_n > 0.0)) throw ValidationError("network.omega_n", "> 0", omega_n);
}

void FaultSpec::validate() const {
    if (!(std::isfinite(r_f) && r_f >= 0.0)) throw ValidationError("fault.r_f", ">= 0", r_f);
}

std::string_view to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::None: return "none";
        case FaultKind::SLG: return "slg";
        case FaultKind::DLG: return "dlg";
        case FaultKind::LL: return "ll";
    }
    return "none";
}

FaultKind parse_fault_kind(std::string_view text) {
    if (text == "none" || text == "nofault") return FaultKind::None;
    if (text == "slg") return FaultKind::SLG;
    if (text == "dlg") return FaultKind::DLG;
    if (text == "ll") return FaultKind::LL;
    throw ContractViolation("unknown fault kind '" + std::string(text) + "' (none|slg|dlg|ll)");
}

std::string_view to_string(FaultModel model) {
    return model == FaultModel::AsPrinted ? "as_printed" : "consistent";
}

FaultModel parse_fault_model(std::string_view text) {
    if (text == "as_printed") return FaultModel::AsPrinted;
    if (text == "consistent") return FaultModel::Consistent;
    throw ContractViolation("unknown fault model '" + std::string(text) + "' (as_printed|consistent)");
}

Phasor parallel_sequence_impedance(const NetworkParams& net, double r_eq) {
    require_finite_nonneg_r_eq(r_eq);
    const Phasor branch = r_eq + net.z_g1();
    return checked_div(net.z_g2() * branch, branch + net.z_g2(), "network: R_eq + Z_g1 + Z_g2 = 0");
}

Phasor zero_sequence_impedance(const NetworkParams& net) { return net.z_g2(); }

Phasor thevenin_fault_voltage(const NetworkParams& net, Phasor e_ref, Phasor v_g, double r_eq) {
    require_finite_nonneg_r_eq(r_eq);
    const Phasor branch = r_eq + net.z_g1();
    const Phasor den = branch + net.z_g2();
    return checked_div(e_ref * net.z_g2() + branch * v_g, den, "network: R_eq + Z_g1 + Z_g2 = 0");
}

namespace {

SequenceSet as_printed(FaultKind kind, Phasor zp, double rf, Phasor vth) {
    switch (kind) {
        case FaultKind::None: return {vth, 0.0, 0.0};
        case FaultKind::SLG: {
            const Phasor den = 3.0 * zp + 3.0 * rf;
            return {checked_div((2.0 * zp + 3.0 * rf) * vth, den, "SLG fault: 3Z_p + 3R_f = 0"),
                    checked_div(-zp * vth, den, "SLG fault: 3Z_p + 3R_f = 0"), 0.0};
        }
        case FaultKind::DLG: {
            const Phasor den = 2.0 * zp + rf;
            return {checked_div((zp + rf) * vth, den, "DLG fault: 2Z_p + R_f = 0"),
                    checked_div(zp * vth, den, "DLG fault: 2Z_p + R_f = 0"), 0.0};
        }
        case FaultKind::LL: {
            const Phasor v = checked_div((zp + 3.0 * rf) * vth, 3.0 * zp + 6.0 * rf,
                                         "LL fault: 3Z_p + 6R_f = 0");
            return {v, v, 0.0};
        }
    }
    return {vth, 0.0, 0.0};
}

// Sequence interconnections of the circuit: Z1 = Z2 = Z_p, Z0 = Z_g2, r_f in each faulted phase
// (SLG, DLG) or between the two faulted phases (LL).
SequenceSet consistent(FaultKind kind, Phasor zp, Phasor z0, double rf, Phasor vth) {
    switch (kind) {
        case FaultKind::None: return {vth, 0.0, 0.0};
        case FaultKind::SLG: {
            const Phasor i1 = checked_div(vth, 2.0 * zp + z0 + 3.0 * rf, "SLG fault loop");
            return {vth - zp * i1, -zp * i1, 0.0};
        }
        case FaultKind::LL: {
            const Phasor i1 = checked_div(vth, 2.0 * zp + rf, "LL fault loop");
            return {vth - zp * i1, zp * i1, 0.0};
        }
        case FaultKind::DLG: {
            const Phasor z2f = zp + rf;
            const Phasor z0f = z0 + rf;
            const Phasor par = checked_div(z2f * z0f, z2f + z0f, "DLG fault loop");
            const Phasor i1 = checked_div(vth, zp + rf + par, "DLG fault loop");
            const Phasor i2 = -i1 * z0f / (z2f + z0f);
            return {vth - zp * i1, -zp * i2, 0.0};
        }
    }
    return {vth, 0.0, 0.0};
}

}  // namespace

SequenceSet fault_point_voltages(const FaultSpec& fault, const NetworkParams& net, Phasor e_ref,
                                 Phasor v_g, double r_eq, FaultModel model) {
    fault.validate();
    const Phasor vth = thevenin_fault_voltage(net, e_ref, v_g, r_eq);
    const Phasor zp = parallel_sequence_impedance(net, r_eq);
    if (model == FaultModel::AsPrinted) return as_printed(fault.kind, zp, fault.r_f, vth);
    return consistent(fault.kind, zp, zero_sequence_impedance(net), fault.r_f, vth);
}

SequenceSet converter_currents(const NetworkParams& net, Phasor e_ref, const SequenceSet& v_f,
                               double r_eq) {
    require_finite_nonneg_r_eq(r_eq);
    const Phasor branch = r_eq + net.z_g1();
    return {checked_div(e_ref - v_f.pos, branch, "converter branch R_eq + Z_g1 = 0"),
            checked_div(-v_f.neg, branch, "converter branch R_eq + Z_g1 = 0"), 0.0};
}

SequenceSet pcc_voltages(Phasor e_ref, const SequenceSet& i_o, double r_eq) {
    require_finite_nonneg_r_eq(r_eq);
    return {e_ref - r_eq * i_o.pos, -r_eq * i_o.neg, 0.0};
}

}  // namespace gfm
