#pragma once

#include <string_view>

#include "gfm/phasor.hpp"

namespace gfm {

/// Grid side of the converter: infinite bus V_g behind Z_g = r_g + j x_g, split at the fault
/// location into Z_g1 = split * Z_g (converter side) and Z_g2 = (1 - split) * Z_g (grid side).
struct NetworkParams {
    double v_g_mag = 1.0;
    double x_g = 0.2;
    double r_g = 0.04;
    double split = 0.5;
    double l_f = 0.1;   // time-domain only
    double c_f = 0.03;  // time-domain only
    double omega_n = kTwoPi * 60.0;

    Phasor z_g() const { return {r_g, x_g}; }
    Phasor z_g1() const { return split * z_g(); }
    Phasor z_g2() const { return (1.0 - split) * z_g(); }
    Phasor v_g() const { return {v_g_mag, 0.0}; }

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

enum class FaultKind { None, SLG, DLG, LL };

/// Which sequence interconnection produces the fault-point voltages.
///
/// AsPrinted evaluates the reduced closed forms literally: Z_0 = Z_p in the SLG and "LL"
/// denominators, and the "DLG" form is the line-to-line interconnection. Consistent uses the interconnection of the
/// three-phase circuit the simulator builds: Z_0 = Z_g2, fault resistance per faulted phase,
/// and labels that match the physical fault.
enum class FaultModel { AsPrinted, Consistent };

struct FaultSpec {
    FaultKind kind = FaultKind::None;
    double r_f = 0.0;

    void validate() const;
};

std::string_view to_string(FaultKind kind);
FaultKind parse_fault_kind(std::string_view text);
std::string_view to_string(FaultModel model);
FaultModel parse_fault_model(std::string_view text);

/// Z_p = Z_n = Z_g2 (R_eq + Z_g1) / (R_eq + Z_g1 + Z_g2).
Phasor parallel_sequence_impedance(const NetworkParams& net, double r_eq);

/// Z_0 = Z_g2 (the converter side of the zero-sequence network is open).
Phasor zero_sequence_impedance(const NetworkParams& net);

/// Open-circuit voltage at the fault point: (E_ref Z_g2 + (R_eq + Z_g1) V_g) / (R_eq + Z_g1 + Z_g2).
Phasor thevenin_fault_voltage(const NetworkParams& net, Phasor e_ref, Phasor v_g, double r_eq);

/// Positive/negative sequence fault-point voltages (zero component reported as 0).
/// FaultKind::None returns the unfaulted divider voltage with zero negative sequence.
SequenceSet fault_point_voltages(const FaultSpec& fault, const NetworkParams& net, Phasor e_ref,
                                 Phasor v_g, double r_eq,
                                 FaultModel model = FaultModel::AsPrinted);

/// i_o+ = (E_ref - V_f+) / (R_eq + Z_g1), i_o- = -V_f- / (R_eq + Z_g1), i_o0 = 0.
SequenceSet converter_currents(const NetworkParams& net, Phasor e_ref, const SequenceSet& v_f,
                               double r_eq);

/// V_o+ = E_ref - R_eq i_o+, V_o- = -R_eq i_o-, V_o0 = 0.
SequenceSet pcc_voltages(Phasor e_ref, const SequenceSet& i_o, double r_eq);

}  // namespace gfm
