#include "gfm/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gfm/errors.hpp"

namespace gfm {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string full_precision(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) throw ParseError("field " + field + ": '" + text + "' is not a number", 0);
    return v;
}

int parse_int(const std::string& field, const std::string& text) {
    const double v = parse_double(field, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("field " + field + ": '" + text + "' is not an integer", 0);
    return static_cast<int>(v);
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const Scenario&)> get;
    std::function<void(Scenario&, const std::string&)> set;

    std::string dotted() const { return section + "." + key; }
};

template <typename Member>
Field number_field(std::string section, std::string key, Member member) {
    const std::string name = section + "." + key;
    return {section, key, [member](const Scenario& s) { return full_precision(std::invoke(member, s)); },
            [member, name](Scenario& s, const std::string& v) { std::invoke(member, s) = parse_double(name, v); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        auto net = [](auto ptr) { return [ptr](auto& s) -> auto& { return s.network.*ptr; }; };
        auto conv = [](auto ptr) { return [ptr](auto& s) -> auto& { return s.converter.*ptr; }; };
        auto sol = [](auto ptr) { return [ptr](auto& s) -> auto& { return s.solver.*ptr; }; };

        f.push_back(number_field("network", "v_g_mag", net(&NetworkParams::v_g_mag)));
        f.push_back(number_field("network", "x_g", net(&NetworkParams::x_g)));
        f.push_back(number_field("network", "r_g", net(&NetworkParams::r_g)));
        f.push_back(number_field("network", "split", net(&NetworkParams::split)));
        f.push_back(number_field("network", "l_f", net(&NetworkParams::l_f)));
        f.push_back(number_field("network", "c_f", net(&NetworkParams::c_f)));
        f.push_back(number_field("network", "omega_n", net(&NetworkParams::omega_n)));

        f.push_back(number_field("converter", "e_ref_mag", conv(&ConverterParams::e_ref_mag)));
        f.push_back(number_field("converter", "i_lim", conv(&ConverterParams::i_lim)));
        f.push_back(number_field("converter", "k_pv", conv(&ConverterParams::k_pv)));
        f.push_back(number_field("converter", "k_iv", conv(&ConverterParams::k_iv)));
        f.push_back(number_field("converter", "p_ref", conv(&ConverterParams::p_ref)));
        f.push_back(number_field("converter", "k_apc", conv(&ConverterParams::k_apc)));
        f.push_back(number_field("converter", "omega_c", conv(&ConverterParams::omega_c)));
        f.push_back(number_field("converter", "omega_n", conv(&ConverterParams::omega_n)));

        f.push_back({"fault", "kind", [](const Scenario& s) { return std::string(to_string(s.fault.kind)); },
                     [](Scenario& s, const std::string& v) { s.fault.kind = parse_fault_kind(v); }});
        f.push_back(number_field("fault", "r_f", [](auto& s) -> auto& { return s.fault.r_f; }));

        f.push_back(number_field("solver", "r_eq_tol", sol(&SolverSettings::r_eq_tol)));
        f.push_back(number_field("solver", "r_eq_cap", sol(&SolverSettings::r_eq_cap)));
        f.push_back({"solver", "delta_points", [](const Scenario& s) { return std::to_string(s.solver.delta_points); },
                     [](Scenario& s, const std::string& v) { s.solver.delta_points = parse_int("solver.delta_points", v); }});
        f.push_back(number_field("solver", "equilibrium_tol", sol(&SolverSettings::equilibrium_tol)));
        f.push_back(number_field("solver", "swing_dt", sol(&SolverSettings::swing_dt)));
        f.push_back(number_field("solver", "horizon", sol(&SolverSettings::horizon)));
        f.push_back(number_field("solver", "settle_band", sol(&SolverSettings::settle_band)));
        f.push_back(number_field("solver", "fault_on", sol(&SolverSettings::fault_on)));
        f.push_back(number_field("solver", "cct_resolution", sol(&SolverSettings::cct_resolution)));
        f.push_back({"solver", "curve_mode", [](const Scenario& s) { return std::string(to_string(s.solver.curve_mode)); },
                     [](Scenario& s, const std::string& v) { s.solver.curve_mode = parse_curve_mode(v); }});
        f.push_back({"solver", "fault_model", [](const Scenario& s) { return std::string(to_string(s.solver.fault_model)); },
                     [](Scenario& s, const std::string& v) { s.solver.fault_model = parse_fault_model(v); }});
        f.push_back(number_field("solver", "sim_dt", sol(&SolverSettings::sim_dt)));
        f.push_back(number_field("solver", "control_dt", sol(&SolverSettings::control_dt)));
        return f;
    }();
    return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields()) {
        if (f.section == section && f.key == key) return &f;
    }
    return nullptr;
}

bool known_section(const std::string& section) {
    return section == "network" || section == "converter" || section == "fault" || section == "solver";
}

void apply_value(Scenario& s, const Field& f, const std::string& value, int line) {
    try {
        f.set(s, value);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line);
    } catch (const ContractViolation& e) {
        throw ParseError(std::string("field ") + f.dotted() + ": " + e.what(), line);
    }
}

LoadedScenario finish(Scenario s, const std::set<std::string>& given) {
    // omega_n lives in two records; one explicit value feeds both.
    const bool net_w = given.contains("network.omega_n");
    const bool conv_w = given.contains("converter.omega_n");
    if (net_w && !conv_w) s.converter.omega_n = s.network.omega_n;
    if (conv_w && !net_w) s.network.omega_n = s.converter.omega_n;

    LoadedScenario out{s, {}};
    for (const auto& f : fields()) {
        if (!given.contains(f.dotted())) out.applied_defaults.push_back(f.dotted() + "=" + f.get(out.scenario));
    }
    out.scenario.validate();
    return out;
}

LoadedScenario parse_ini(const std::string& text) {
    Scenario s;
    std::set<std::string> given;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!known_section(section)) throw ParseError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        if (section.empty()) throw ParseError("key outside of any section", line_no);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const Field* f = find_field(section, key);
        if (!f) throw ParseError("unknown key '" + key + "' in [" + section + "]", line_no);
        if (!given.insert(f->dotted()).second) throw ParseError("duplicate key " + f->dotted(), line_no);
        apply_value(s, *f, value, line_no);
    }
    return finish(s, given);
}

int line_of_offset(const std::string& text, std::size_t offset) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(std::min(offset, text.size())), '\n'));
}

LoadedScenario parse_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON: ") + e.what(), line_of_offset(text, e.byte));
    }
    if (!doc.is_object()) throw ParseError("JSON scenario must be an object", 1);
    Scenario s;
    std::set<std::string> given;
    for (const auto& [section, body] : doc.items()) {
        if (!known_section(section)) throw ParseError("unknown section \"" + section + "\"", 0);
        if (!body.is_object()) throw ParseError("section \"" + section + "\" must be an object", 0);
        for (const auto& [key, value] : body.items()) {
            const Field* f = find_field(section, key);
            if (!f) throw ParseError("unknown key \"" + key + "\" in \"" + section + "\"", 0);
            given.insert(f->dotted());
            std::string text_value;
            if (value.is_string()) {
                text_value = value.get<std::string>();
            } else if (value.is_number()) {
                text_value = full_precision(value.get<double>());
            } else {
                throw ParseError("field " + f->dotted() + " must be a number or string", 0);
            }
            apply_value(s, *f, text_value, 0);
        }
    }
    return finish(s, given);
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json(text);
    return parse_ini(text);
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file " + path.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream os;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) os << '\n';
            section = f.section;
            os << '[' << section << "]\n";
        }
        os << f.key << " = " << f.get(s) << '\n';
    }
    return os.str();
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write scenario file " + path.string());
    out << serialize_scenario(scenario);
}

void set_scenario_field(Scenario& scenario, const std::string& dotted_key, const std::string& value) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos) throw ParseError("override key must be section.key, got " + dotted_key, 0);
    const Field* f = find_field(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
    if (!f) throw ParseError("unknown key " + dotted_key, 0);
    apply_value(scenario, *f, value, 0);
    if (dotted_key == "network.omega_n") scenario.converter.omega_n = scenario.network.omega_n;
    if (dotted_key == "converter.omega_n") scenario.network.omega_n = scenario.converter.omega_n;
}

std::string scenario_hash(const Scenario& scenario) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : serialize_scenario(scenario)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

void write_curve_csv(std::ostream& os, const PdeltaCurve& curve) {
    os << kCurveHeader << '\n';
    for (const auto& p : curve.points) {
        os << format_number(p.delta) << ',' << format_number(p.r_eq) << ',' << format_number(p.c) << ','
           << format_number(p.p_pos) << ',' << format_number(p.p_neg) << ',' << format_number(p.p_total) << ','
           << format_number(p.p_2w_amp) << ',' << (p.limiting ? 1 : 0) << '\n';
    }
}

void write_equilibria_csv(std::ostream& os, const std::vector<Equilibrium>& eqs) {
    os << kEquilibriaHeader << '\n';
    for (const auto& e : eqs) {
        os << format_number(e.delta) << ',' << to_string(e.kind) << ',' << format_number(e.slope) << '\n';
    }
}

void write_swing_csv(std::ostream& os, const SwingTrace& trace) {
    os << kSwingHeader << '\n';
    for (const auto& s : trace.samples) {
        os << format_number(s.t) << ',' << format_number(s.state.delta) << ',' << format_number(s.state.omega) << ','
           << format_number(s.p_o) << ',' << to_string(s.phase) << '\n';
    }
}

void write_waveform_csv(std::ostream& os, const SimTrace& trace, int downsample) {
    if (downsample < 1) throw ContractViolation("downsample must be >= 1");
    os << kWaveformHeader << '\n';
    for (std::size_t k = 0; k < trace.size(); k += static_cast<std::size_t>(downsample)) {
        const auto& v = trace.v_o[k];
        const auto& i = trace.i_o[k];
        os << format_number(trace.t[k]) << ',' << format_number(v.a) << ',' << format_number(v.b) << ','
           << format_number(v.c) << ',' << format_number(i.a) << ',' << format_number(i.b) << ','
           << format_number(i.c) << ',' << format_number(trace.p_inst[k]) << ',' << format_number(trace.c[k]) << ','
           << format_number(trace.theta_ref[k]) << '\n';
    }
}

}  // namespace gfm
