#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfm/power_angle.hpp"
#include "gfm/scenario.hpp"
#include "gfm/swing.hpp"
#include "gfm/timedomain.hpp"

namespace gfm {

inline constexpr const char* kToolVersion = "0.1.0";

struct LoadedScenario {
    Scenario scenario;
    std::vector<std::string> applied_defaults;  // "section.key=value" for every key not given
};

/// Parses the INI-style key/value format (sections [network], [converter], [fault], [solver];
/// '#' or ';' comments). A document whose first non-blank character is '{' is read as JSON with
/// the same sections as objects. Unknown sections or keys are rejected.
LoadedScenario parse_scenario(const std::string& text);
LoadedScenario load_scenario(const std::filesystem::path& path);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Sets one "section.key" field from text; throws ValidationError/ParseError on bad input.
void set_scenario_field(Scenario& scenario, const std::string& dotted_key, const std::string& value);

/// 12 significant digits, shortest form, '.' decimal point.
std::string format_number(double v);

void write_curve_csv(std::ostream& os, const PdeltaCurve& curve);
void write_equilibria_csv(std::ostream& os, const std::vector<Equilibrium>& eqs);
void write_swing_csv(std::ostream& os, const SwingTrace& trace);
void write_waveform_csv(std::ostream& os, const SimTrace& trace, int downsample = 1);

inline constexpr const char* kCurveHeader =
    "delta_rad,r_eq_pu,c,p_pos_pu,p_neg_pu,p_total_pu,p2w_pu,limiting";
inline constexpr const char* kSwingHeader = "t_s,delta_rad,omega_pu,p_o_pu,phase";
inline constexpr const char* kWaveformHeader = "t_s,va,vb,vc,ia,ib,ic,p_inst,c,theta_ref";
inline constexpr const char* kEquilibriaHeader = "delta_rad,kind,slope_pu_per_rad";
inline constexpr const char* kLimiterHeader =
    "ipos_pu,ineg_pu,phisum_deg,peak_a_pu,peak_b_pu,peak_c_pu,max_peak_pu,c";

/// Parsed command-line options shared by every subcommand. Unset optionals keep the
/// scenario file (or default) value.
struct CommandFlags {
    std::optional<std::filesystem::path> scenario_file;
    std::optional<std::string> fault;
    std::optional<double> r_f;
    std::optional<double> split;
    std::optional<int> delta_points;
    std::optional<double> resolution;
    std::optional<double> horizon;
    std::filesystem::path out_dir = ".";
    std::vector<std::string> sets;  // raw "section.key=value" overrides

    // swing / simulate
    std::optional<double> fault_duration;
    std::optional<double> fault_on;
    std::optional<double> sim_time;
    std::optional<double> frozen_delta_deg;
    int downsample = 1;

    // limiter
    double i_pos = 1.0;
    double i_neg = 0.0;
    double phisum_deg = 0.0;
    std::optional<double> i_lim;
};

struct CommandResult {
    int exit_status = 0;
    std::vector<std::filesystem::path> artifacts;
    std::string summary;     // human-readable line(s) for stdout
    std::string diagnostic;  // set on failure
};

/// Runs one of curve, equilibria, cct, swing, simulate, limiter. Output files and
/// manifest.json are written into flags.out_dir. Module errors become a nonzero status with a
/// structured diagnostic; they are never thrown.
CommandResult run_command(const std::string& command, const CommandFlags& flags);

}  // namespace gfm
