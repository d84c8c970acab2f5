#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gfm/errors.hpp"
#include "gfm/limiter.hpp"
#include "gfm/scenario_io.hpp"

namespace gfm {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Prepared {
    Scenario scenario;
    std::vector<std::string> applied_defaults;
    std::vector<std::string> overrides;
};

Prepared prepare(const CommandFlags& flags) {
    Prepared p;
    if (flags.scenario_file) {
        LoadedScenario loaded = load_scenario(*flags.scenario_file);
        p.scenario = loaded.scenario;
        p.applied_defaults = std::move(loaded.applied_defaults);
    } else {
        LoadedScenario loaded = parse_scenario("");
        p.scenario = loaded.scenario;
        p.applied_defaults = std::move(loaded.applied_defaults);
    }
    auto set = [&](const std::string& key, const std::string& value) {
        set_scenario_field(p.scenario, key, value);
        p.overrides.push_back(key + "=" + value);
    };
    for (const auto& raw : flags.sets) {
        const auto eq = raw.find('=');
        if (eq == std::string::npos) throw ParseError("override '" + raw + "' is not section.key=value", 0);
        set(raw.substr(0, eq), raw.substr(eq + 1));
    }
    if (flags.fault) set("fault.kind", *flags.fault);
    if (flags.r_f) set("fault.r_f", format_number(*flags.r_f));
    if (flags.split) set("network.split", format_number(*flags.split));
    if (flags.delta_points) set("solver.delta_points", std::to_string(*flags.delta_points));
    if (flags.resolution) set("solver.cct_resolution", format_number(*flags.resolution));
    if (flags.horizon) set("solver.horizon", format_number(*flags.horizon));
    if (flags.fault_on) set("solver.fault_on", format_number(*flags.fault_on));
    if (flags.i_lim) set("converter.i_lim", format_number(*flags.i_lim));
    p.scenario.validate();
    return p;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Scenario echo built from the canonical serialization so it always lists every field.
ordered_json scenario_json(const Scenario& s) {
    ordered_json out = ordered_json::object();
    std::istringstream in(serialize_scenario(s));
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            out[section] = ordered_json::object();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string x) {
            const auto b = x.find_first_not_of(' ');
            const auto e = x.find_last_not_of(' ');
            return b == std::string::npos ? std::string{} : x.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        char* end = nullptr;
        const double d = std::strtod(value.c_str(), &end);
        if (!value.empty() && end == value.c_str() + value.size()) {
            out[section][key] = d;
        } else {
            out[section][key] = value;
        }
    }
    return out;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    body(os);
    if (!os) throw Error("write failed for " + path.string());
}

std::string cct_value(const CctResult& r) { return r.cct ? format_number(*r.cct) : "unbounded"; }

}  // namespace

CommandResult run_command(const std::string& command, const CommandFlags& flags) {
    CommandResult result;
    ordered_json diag;
    try {
        static const std::vector<std::string> known{"curve", "equilibria", "cct", "swing", "simulate", "limiter"};
        if (std::find(known.begin(), known.end(), command) == known.end()) {
            throw ParseError("unknown command '" + command + "'", 0);
        }
        const Prepared prep = prepare(flags);
        const Scenario& s = prep.scenario;
        const std::string hash = scenario_hash(s);
        fs::create_directories(flags.out_dir);
        ordered_json extra = ordered_json::object();

        auto out = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
            const fs::path path = flags.out_dir / name;
            write_text(path, body);
            result.artifacts.push_back(path);
        };

        if (command == "curve") {
            const PdeltaCurve curve = p_delta_curve(s, s.solver.delta_points);
            out("curve.csv", [&](std::ostream& os) { write_curve_csv(os, curve); });
            double p_max = -1e300, p_neg_max = -1e300;
            for (const auto& p : curve.points) {
                p_max = std::max(p_max, p.p_total);
                p_neg_max = std::max(p_neg_max, p.p_neg);
            }
            result.summary = "scenario_hash=" + hash + " points=" + std::to_string(curve.points.size()) +
                             " p_max_pu=" + format_number(p_max) + " p_neg_max_pu=" + format_number(p_neg_max);
        } else if (command == "equilibria") {
            const PdeltaCurve curve = p_delta_curve(s, s.solver.delta_points);
            const auto eqs = find_equilibria(curve, s.converter.p_ref);
            out("equilibria.csv", [&](std::ostream& os) { write_equilibria_csv(os, eqs); });
            int n_sep = 0, n_uep = 0;
            for (const auto& e : eqs) (e.kind == EquilibriumKind::SEP ? n_sep : n_uep)++;
            result.summary = "scenario_hash=" + hash + " sep_count=" + std::to_string(n_sep) +
                             " uep_count=" + std::to_string(n_uep);
        } else if (command == "cct") {
            const CctResult r = critical_clearing_time(s, s.solver.cct_resolution, s.solver.horizon);
            result.summary = "scenario_hash=" + hash + " cct_s=" + cct_value(r) +
                             " resolution_s=" + format_number(r.resolution);
            out("cct.txt", [&](std::ostream& os) { os << result.summary << '\n'; });
            out("cct_runs.csv", [&](std::ostream& os) {
                os << "fault_duration_s,verdict\n";
                for (const auto& run : r.runs) os << format_number(run.fault_duration) << ',' << to_string(run.verdict) << '\n';
            });
            extra["cct_s"] = r.cct ? ordered_json(*r.cct) : ordered_json("unbounded");
            extra["monotonicity_violations"] = r.monotonicity_violations;
        } else if (command == "swing") {
            if (!flags.fault_duration) throw ValidationError("fault_duration", "given for swing", std::nan(""));
            const SwingSetup setup = make_swing_setup(s);
            const SwingTrace trace = run_clearing(s, setup, *flags.fault_duration, s.solver.horizon, false);
            out("swing.csv", [&](std::ostream& os) { write_swing_csv(os, trace); });
            result.summary = "scenario_hash=" + hash + " fault_duration_s=" + format_number(*flags.fault_duration) +
                             " verdict=" + std::string(to_string(trace.verdict));
        } else if (command == "simulate") {
            EventTimeline tl;
            tl.fault_on = s.solver.fault_on;
            tl.fault_duration = flags.fault_duration.value_or(0.0);
            tl.horizon = flags.sim_time.value_or(tl.clearing_time() + 1.0);
            SimOptions opt;
            if (flags.frozen_delta_deg) opt.frozen_delta = deg2rad(*flags.frozen_delta_deg);
            const SimTrace trace = simulate(s, tl, opt);
            out("waveform.csv", [&](std::ostream& os) { write_waveform_csv(os, trace, flags.downsample); });
            result.summary = "scenario_hash=" + hash + " samples=" + std::to_string(trace.size()) +
                             " final_delta_rad=" + format_number(trace.delta.back()) +
                             " max_zero_sum=" + format_number(trace.max_zero_sum);
        } else {
            const Phasor i_pos = std::polar(flags.i_pos, deg2rad(flags.phisum_deg));
            const Phasor i_neg{flags.i_neg, 0.0};
            const PhasePeaks pk = phase_peaks(i_pos, i_neg);
            const double c = scaling_factor(pk.max_peak, s.converter.i_lim);
            std::ostringstream row;
            row << format_number(flags.i_pos) << ',' << format_number(flags.i_neg) << ','
                << format_number(flags.phisum_deg) << ',' << format_number(pk.peak_a) << ','
                << format_number(pk.peak_b) << ',' << format_number(pk.peak_c) << ','
                << format_number(pk.max_peak) << ',' << format_number(c);
            out("limiter.csv", [&](std::ostream& os) { os << kLimiterHeader << '\n' << row.str() << '\n'; });
            result.summary = std::string(kLimiterHeader) + "\n" + row.str();
        }

        ordered_json manifest;
        manifest["scenario_hash"] = hash;
        manifest["command"] = command;
        manifest["tool_version"] = kToolVersion;
        manifest["timestamp"] = utc_timestamp();
        std::vector<std::string> outputs;
        for (const auto& a : result.artifacts) outputs.push_back(a.string());
        manifest["outputs"] = outputs;
        manifest["overrides"] = prep.overrides;
        manifest["applied_defaults"] = prep.applied_defaults;
        manifest["scenario"] = scenario_json(s);
        if (!extra.empty()) manifest["result"] = extra;
        const fs::path mpath = flags.out_dir / "manifest.json";
        write_text(mpath, [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
        result.artifacts.push_back(mpath);
        return result;
    } catch (const ValidationError& e) {
        result.exit_status = 2;
        diag = {{"error", "validation"}, {"field", e.field()}, {"message", e.what()}};
    } catch (const ParseError& e) {
        result.exit_status = 2;
        diag = {{"error", "parse"}, {"line", e.line()}, {"message", e.what()}};
    } catch (const DivergenceError& e) {
        result.exit_status = 3;
        diag = {{"error", "divergence"}, {"last_valid_time_s", e.last_valid_time()}, {"message", e.what()}};
    } catch (const Error& e) {
        result.exit_status = 3;
        diag = {{"error", "module"}, {"message", e.what()}};
    } catch (const std::exception& e) {
        result.exit_status = 4;
        diag = {{"error", "internal"}, {"message", e.what()}};
    }
    diag["command"] = command;
    result.diagnostic = diag.dump();
    return result;
}

}  // namespace gfm
