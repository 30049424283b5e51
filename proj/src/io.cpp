#include "ftecdi/io.hpp"

#include "ftecdi/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ftecdi::io {

std::string format9(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    return cells;
}

double to_double(const std::string& s, const std::string& path, std::size_t line)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) {
        throw IoError(path + ":" + std::to_string(line) + ": not a number '" + s + "'");
    }
    return v;
}

} // namespace

void write_cycle_csv(const CycleResult& r, const std::string& path)
{
    auto out = open_out(path);
    out << "t_s,I_A,c_outlet_mM,c_sensed_mM\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out << format9(r.times[i]) << ',' << format9(r.current[i]) << ',' << format9(r.c_outlet[i])
            << ',' << format9(r.c_sensed[i]) << '\n';
    }
    finish(out, path);
}

CycleSeries read_cycle_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    CycleSeries s;
    std::string line;
    std::getline(in, line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cells = split_csv(line);
        if (cells.size() != 4) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
        }
        s.t.push_back(to_double(cells[0], path, lineno));
        s.current.push_back(to_double(cells[1], path, lineno));
        s.c_outlet.push_back(to_double(cells[2], path, lineno));
        s.c_sensed.push_back(to_double(cells[3], path, lineno));
    }
    return s;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path)
{
    auto out = open_out(path);
    out << "V_ch_V,charge_C,eq_sac_mg_g,lambda\n";
    for (const auto& sp : points) {
        const auto& p = sp.point;
        out << format9(p.v_ch) << ',' << format9(sp.ok ? p.charge : NAN) << ','
            << format9(sp.ok ? p.eq_sac : NAN) << ',' << format9(p.charge_efficiency) << '\n';
    }
    finish(out, path);
}

EquilibriumDataset read_dataset_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path + ": empty dataset");
    }
    const auto header = split_csv(line);
    const bool weighted = header.size() == 5;
    if (header.size() < 4 || header.size() > 5 || header[0] != "V_ch_V" || header[1] != "c_feed_mM" ||
        header[2] != "charge_C" || header[3] != "eq_sac_mg_g" || (weighted && header[4] != "weight")) {
        throw IoError(path + ": header must be V_ch_V,c_feed_mM,charge_C,eq_sac_mg_g[,weight]");
    }
    EquilibriumDataset data;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw IoError(path + ":" + std::to_string(lineno) + ": wrong column count");
        }
        EquilibriumRow row;
        row.v_ch = to_double(cells[0], path, lineno);
        row.c_feed = to_double(cells[1], path, lineno);
        row.charge = to_double(cells[2], path, lineno);
        row.eq_sac = to_double(cells[3], path, lineno);
        if (weighted) {
            row.weight = to_double(cells[4], path, lineno);
        }
        data.rows.push_back(row);
    }
    return data;
}

void write_dataset_csv(const EquilibriumDataset& data, const std::string& path)
{
    auto out = open_out(path);
    out << "V_ch_V,c_feed_mM,charge_C,eq_sac_mg_g,weight\n";
    char buf[160];
    for (const auto& r : data.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.v_ch, r.c_feed, r.charge,
                      r.eq_sac, r.weight);
        out << buf;
    }
    finish(out, path);
}

nlohmann::json cycle_metrics(const CycleResult& r)
{
    nlohmann::json j;
    j["charge_stored_C"] = r.charge_out;
    j["charge_in_C"] = r.charge_in;
    j["salt_removed_mol"] = r.salt_removed;
    j["salt_released_mol"] = r.salt_released;
    j["eq_sac_mg_g"] = r.eq_sac;
    j["charge_efficiency"] = std::isnan(r.charge_efficiency) ? nlohmann::json() : nlohmann::json(r.charge_efficiency);
    j["discharge_start_s"] = r.times.empty() ? 0.0 : r.times[r.discharge_start];
    j["samples"] = r.times.size();
    j["complete"] = r.complete();
    if (!r.message.empty()) {
        j["message"] = r.message;
    }
    return j;
}

nlohmann::json equilibrium_json(const EquilibriumPoint& p)
{
    nlohmann::json j;
    j["V_ch_V"] = p.v_ch;
    j["c_feed_mM"] = p.c_feed;
    j["sigma_mM"] = p.sigma;
    j["charge_C"] = p.charge;
    j["salt_mol"] = p.salt_mol;
    j["eq_sac_mg_g"] = p.eq_sac;
    j["charge_efficiency"] =
        std::isnan(p.charge_efficiency) ? nlohmann::json() : nlohmann::json(p.charge_efficiency);
    return j;
}

nlohmann::json fit_json(const FitResult& f)
{
    nlohmann::json j;
    j["v_mi_mL_g"] = f.params.micropore_volume * 1e3;
    j["E"] = f.params.attraction_energy;
    j["C_S_F_mL"] = f.params.stern_capacitance * 1e-6;
    j["objective"] = f.objective;
    j["residual_norm"] = f.residual_norm;
    j["row_residuals"] = f.row_residuals;
    j["converged"] = f.converged;
    j["evaluations"] = f.evaluations;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& metrics, const RunConfig& config)
{
    nlohmann::json doc;
    doc["metrics"] = metrics;
    doc["config"] = config.echo; // std::map keeps keys sorted
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

} // namespace ftecdi::io
