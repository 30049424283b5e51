#include "ftecdi/config.hpp"

#include "ftecdi/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ftecdi {

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = {
        {"l_e", "um", "500", "electrode thickness"},
        {"l_sp", "um", "260", "spacer thickness"},
        {"p_sp", "", "0.85", "spacer porosity"},
        {"rho_elec", "g/mL", "0.25", "electrode mass density"},
        {"rho_sk", "g/mL", "1.9", "carbon skeleton density"},
        {"v_mi", "mL/g", "0.55", "specific micropore volume"},
        {"E", "", "700", "ion attraction energy, kT mol/m^3"},
        {"C_S", "F/mL", "145", "volumetric Stern capacitance"},
        {"D_inf", "m2/s", "1.68e-9", "free-solution salt diffusivity"},
        {"T", "K", "298.15", "temperature"},
        {"v_sup", "um/s", "66.4", "superficial velocity"},
        {"flow_rate", "mL/min", "1", "feed flow rate"},
        {"area", "cm2", "", "flow cross-section; derived from flow_rate / v_sup when unset"},
        {"c_feed", "mM", "5", "feed salt concentration"},
        {"V_ch", "V", "1.2", "charging voltage"},
        {"V_dis", "V", "0", "discharging voltage"},
        {"current_tol", "uA", "1", "half-cycle end: |I| below this"},
        {"conc_tol_rel", "", "0.01", "half-cycle end: |c_out - c_feed| / c_feed below this"},
        {"max_time", "s", "7200", "longest simulated half-cycle"},
        {"t_mix", "s", "60", "downstream mixing tank residence time"},
        {"t_plug", "s", "15", "downstream plug-flow delay"},
        {"n_e", "", "40", "cells per electrode"},
        {"n_sp", "", "10", "cells in the spacer"},
        {"newton_tol", "", "1e-10", "Newton tolerance on the scaled residual"},
        {"newton_max_iter", "", "12", "Newton iteration cap"},
        {"dt_init", "s", "0.001", "first time step of a half-cycle"},
        {"dt_min", "s", "1e-09", "smallest time step before giving up"},
        {"dt_max", "s", "1", "largest time step"},
        {"step_growth", "", "1.25", "time step growth factor"},
        {"step_shrink", "", "0.5", "time step shrink factor"},
        {"ramp_time", "s", "0.1", "voltage ramp duration"},
        {"max_current_change", "", "0.005", "largest relative current change per step after the ramp"},
        {"voltages", "V", "0.2,0.4,0.6,0.8,1,1.2", "sweep voltages, comma separated"},
    };
    return keys;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_full(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool unit_matches(const std::string& given, const std::string& expected)
{
    if (given == expected) {
        return true;
    }
    // Accept the micro sign spelled out as mu or the Unicode characters.
    for (const char* micro : {"\xC2\xB5", "\xCE\xBC"}) {
        const std::string m(micro);
        if (given.rfind(m, 0) == 0 && expected.rfind("u", 0) == 0 &&
            given.substr(m.size()) == expected.substr(1)) {
            return true;
        }
    }
    return false;
}

struct Parsed {
    std::map<std::string, double> numbers;
    std::vector<double> voltages;
    std::vector<std::string> errors;
};

void parse_number(const ConfigKey& key, const std::string& raw, Parsed& out, double& dest)
{
    const std::string text = trim(raw);
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE || !std::isfinite(v)) {
        out.errors.push_back(key.name + ": expected a number, got '" + text + "'");
        return;
    }
    const std::string unit = trim(std::string(end));
    if (!unit.empty() && !unit_matches(unit, key.unit)) {
        out.errors.push_back(key.name + ": expected unit " +
                             (key.unit.empty() ? std::string("(none)") : key.unit) + ", got '" + unit +
                             "'");
        return;
    }
    dest = v;
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

namespace {

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    if (!is_json) {
        return parse_key_values(text);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const nlohmann::json& obj = doc.contains("config") ? doc["config"] : doc;
    if (!obj.is_object()) {
        throw ConfigError(path + ": expected a JSON object of configuration keys");
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : obj.items()) {
        out.emplace_back(k, v.is_string() ? v.get<std::string>() : format_full(v.get<double>()));
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::optional<std::string>& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides)
{
    std::map<std::string, const ConfigKey*> by_name;
    std::map<std::string, std::string> raw;
    for (const auto& k : config_keys()) {
        by_name[k.name] = &k;
        raw[k.name] = k.default_value;
    }

    Parsed parsed;
    std::set<std::string> explicit_keys;
    auto apply = [&](const std::vector<std::pair<std::string, std::string>>& entries) {
        for (const auto& [k, v] : entries) {
            if (!by_name.contains(k)) {
                parsed.errors.push_back("unknown key '" + k + "'");
                continue;
            }
            raw[k] = v;
            explicit_keys.insert(k);
        }
    };
    if (file) {
        apply(read_config_file(*file));
    }
    apply(overrides);

    for (const auto& k : config_keys()) {
        const std::string& text = raw[k.name];
        if (k.name == "voltages") {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                double v = NAN;
                parse_number(k, item, parsed, v);
                if (!std::isnan(v)) {
                    parsed.voltages.push_back(v);
                }
            }
            continue;
        }
        if (trim(text).empty()) {
            continue; // derived
        }
        double v = NAN;
        parse_number(k, text, parsed, v);
        if (!std::isnan(v)) {
            parsed.numbers[k.name] = v;
        }
    }
    if (!parsed.errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : parsed.errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    const auto& num = parsed.numbers;
    auto get = [&](const char* name) { return num.at(name); };
    std::vector<std::string> errors;

    RunConfig cfg;
    CellParams& p = cfg.params;
    p.electrode_thickness = get("l_e") * 1e-6;
    p.spacer_thickness = get("l_sp") * 1e-6;
    p.spacer_porosity = get("p_sp");
    p.edl.electrode_density = get("rho_elec") * 1e3;
    p.skeleton_density = get("rho_sk") * 1e3;
    p.edl.micropore_volume = get("v_mi") * 1e-3;
    p.edl.attraction_energy = get("E");
    p.edl.stern_capacitance = get("C_S") * 1e6;
    p.constants.d_infty = get("D_inf");
    p.constants.temperature = get("T");

    // flow_rate = v_sup * area: any two determine the third.
    const double flow = get("flow_rate") * 1e-6 / 60.0;
    const double velocity = get("v_sup") * 1e-6;
    const bool has_area = num.contains("area");
    const bool flow_set = explicit_keys.contains("flow_rate");
    const bool v_set = explicit_keys.contains("v_sup");
    if (has_area) {
        p.area = get("area") * 1e-4;
        if (flow_set && !v_set) {
            p.velocity = flow / p.area;
        } else {
            p.velocity = velocity;
            if (flow_set && std::abs(velocity * p.area - flow) > 1e-9 * flow) {
                errors.push_back("flow_rate, v_sup and area are inconsistent (flow_rate = v_sup * area)");
            }
        }
    } else {
        p.velocity = velocity;
        p.area = flow / velocity;
    }

    CycleSpec& c = cfg.cycle;
    c.c_feed = get("c_feed");
    c.v_ch = get("V_ch");
    c.v_dis = get("V_dis");
    c.flow_rate = p.velocity * p.area;
    c.current_tol = get("current_tol") * 1e-6;
    c.conc_tol_rel = get("conc_tol_rel");
    c.max_time = get("max_time");
    c.downstream.t_mix = get("t_mix");
    c.downstream.t_plug = get("t_plug");

    auto count = [&](const char* name) -> std::size_t {
        const double v = get(name);
        if (!(v >= 0.0) || v != std::floor(v)) {
            errors.push_back(std::string(name) + " must be a non-negative integer");
            return 0;
        }
        return static_cast<std::size_t>(v);
    };
    SimulationOptions& s = cfg.simulation;
    s.n_electrode = count("n_e");
    s.n_spacer = count("n_sp");
    if (s.n_electrode < 2) errors.push_back("n_e must be at least 2");
    if (s.n_spacer < 2) errors.push_back("n_sp must be at least 2");
    s.solver.newton_tol = get("newton_tol");
    s.solver.newton_max_iter = static_cast<int>(count("newton_max_iter"));
    s.solver.dt_init = get("dt_init");
    s.solver.dt_min = get("dt_min");
    s.solver.dt_max = get("dt_max");
    s.solver.step_growth = get("step_growth");
    s.solver.step_shrink = get("step_shrink");
    s.solver.ramp_time = get("ramp_time");
    s.solver.max_current_change = get("max_current_change");

    cfg.voltages = parsed.voltages;
    if (cfg.voltages.empty()) {
        errors.push_back("voltages: need at least one value");
    }
    for (double v : cfg.voltages) {
        if (!(v >= 0.0)) {
            errors.push_back("voltages: values must be >= 0 V");
            break;
        }
    }

    for (auto&& list : {p.violations(), c.violations(), s.solver.violations()}) {
        errors.insert(errors.end(), list.begin(), list.end());
    }
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    for (const auto& k : config_keys()) {
        if (k.name == "voltages") {
            std::string joined;
            for (std::size_t i = 0; i < cfg.voltages.size(); ++i) {
                joined += (i ? "," : "") + format_full(cfg.voltages[i]);
            }
            cfg.echo[k.name] = joined;
        } else if (k.name == "area") {
            cfg.echo[k.name] = format_full(p.area * 1e4);
        } else if (k.name == "v_sup") {
            cfg.echo[k.name] = format_full(p.velocity * 1e6);
        } else if (k.name == "flow_rate") {
            cfg.echo[k.name] = format_full(p.velocity * p.area * 60.0 * 1e6);
        } else {
            cfg.echo[k.name] = format_full(get(k.name.c_str()));
        }
    }
    return cfg;
}

} // namespace ftecdi
