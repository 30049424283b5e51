// Command-line front end: equilibrium | simulate | sweep | fit.

#include "ftecdi/calibrate.hpp"
#include "ftecdi/config.hpp"
#include "ftecdi/errors.hpp"
#include "ftecdi/io.hpp"
#include "ftecdi/protocol.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

namespace {

enum ExitCode { ok = 0, config_error = 2, solver_error = 3, io_error = 4 };

struct Common {
    std::string config_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    std::string out = "ftecdi_out";
};

void add_common(CLI::App& app, Common& c)
{
    app.add_option("-c,--config", c.config_file, "key=value file or a JSON sidecar from a previous run");
    app.add_option("--set", c.sets, "override one key, KEY=VALUE (repeatable)");
    app.add_option("-o,--out", c.out, "output path prefix");
    for (const auto& k : ftecdi::config_keys()) {
        std::string help = k.help;
        if (!k.unit.empty()) {
            help += " [" + k.unit + "]";
        }
        if (!k.default_value.empty()) {
            help += " (default " + k.default_value + ")";
        }
        app.add_option("--" + k.name, c.flags[k.name], help);
    }
}

ftecdi::RunConfig load(const Common& c)
{
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& [k, v] : c.flags) {
        if (!v.empty()) {
            overrides.emplace_back(k, v);
        }
    }
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ftecdi::ConfigError("--set expects KEY=VALUE, got '" + s + "'");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    std::optional<std::string> file;
    if (!c.config_file.empty()) {
        file = c.config_file;
    }
    return ftecdi::parse_config(file, overrides);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Flow-through electrode capacitive deionization: 1D cell simulator and calibration"};
    app.require_subcommand(1);

    Common eq_opts, sim_opts, sweep_opts, fit_opts;
    auto* eq_cmd = app.add_subcommand("equilibrium", "equilibrium charge, eq-SAC and charge efficiency at V_ch");
    add_common(*eq_cmd, eq_opts);

    bool raw_outlet = false;
    auto* sim_cmd = app.add_subcommand("simulate", "constant-voltage charge/discharge cycle");
    add_common(*sim_cmd, sim_opts);
    sim_cmd->add_flag("--raw-outlet", raw_outlet, "report the cell-exit concentration without the downstream volume");

    auto* sweep_cmd = app.add_subcommand("sweep", "equilibrium sweep over the configured voltages");
    add_common(*sweep_cmd, sweep_opts);

    std::string dataset;
    auto* fit_cmd = app.add_subcommand("fit", "fit v_mi, E and C_S to equilibrium data");
    add_common(*fit_cmd, fit_opts);
    fit_cmd->add_option("--data", dataset, "CSV: V_ch_V,c_feed_mM,charge_C,eq_sac_mg_g[,weight]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (*eq_cmd) {
            const auto cfg = load(eq_opts);
            const auto p = ftecdi::solve_equilibrium(cfg.params, cfg.cycle.v_ch, cfg.cycle.c_feed);
            const auto j = ftecdi::io::equilibrium_json(p);
            ftecdi::io::write_json(eq_opts.out + ".json", j, cfg);
            std::cout << j.dump(2) << '\n';
            return ok;
        }
        if (*sweep_cmd) {
            const auto cfg = load(sweep_opts);
            const auto points = ftecdi::equilibrium_sweep(cfg.params, cfg.voltages, cfg.cycle.c_feed);
            ftecdi::io::write_sweep_csv(points, sweep_opts.out + ".csv");
            nlohmann::json j = nlohmann::json::array();
            bool all_ok = true;
            for (const auto& sp : points) {
                auto row = ftecdi::io::equilibrium_json(sp.point);
                if (!sp.ok) {
                    row["error"] = sp.error;
                    all_ok = false;
                }
                j.push_back(row);
            }
            ftecdi::io::write_json(sweep_opts.out + ".json", j, cfg);
            return all_ok ? ok : solver_error;
        }
        if (*sim_cmd) {
            auto cfg = load(sim_opts);
            if (raw_outlet) {
                cfg.cycle.downstream = {0.0, 0.0};
            }
            const auto result = ftecdi::run_cv_cycle(cfg.params, cfg.cycle, cfg.simulation);
            auto metrics = ftecdi::io::cycle_metrics(result);
            metrics["raw_outlet"] = raw_outlet;
            ftecdi::io::write_cycle_csv(result, sim_opts.out + ".csv");
            ftecdi::io::write_json(sim_opts.out + ".json", metrics, cfg);
            std::cout << metrics.dump(2) << '\n';
            if (!result.complete()) {
                std::cerr << "simulation incomplete: " << result.message << '\n';
                return solver_error;
            }
            return ok;
        }
        if (*fit_cmd) {
            const auto cfg = load(fit_opts);
            const auto data = ftecdi::io::read_dataset_csv(dataset);
            ftecdi::ElectrodeFit initial{cfg.params.edl.micropore_volume, cfg.params.edl.attraction_energy,
                                         cfg.params.edl.stern_capacitance};
            const auto fit = ftecdi::fit_equilibrium(cfg.params, data, initial);
            const auto j = ftecdi::io::fit_json(fit);
            ftecdi::io::write_json(fit_opts.out + ".json", j, cfg);
            std::cout << j.dump(2) << '\n';
            return fit.converged ? ok : solver_error;
        }
    } catch (const ftecdi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ftecdi::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return io_error;
    } catch (const ftecdi::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver_error;
    }
    return ok;
}
