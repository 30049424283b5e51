#pragma once

#include "ftecdi/calibrate.hpp"
#include "ftecdi/config.hpp"
#include "ftecdi/protocol.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ftecdi::io {

/// `t_s,I_A,c_outlet_mM,c_sensed_mM`, one row per accepted step, 9 significant
/// digits.
void write_cycle_csv(const CycleResult& result, const std::string& path);

struct CycleSeries {
    std::vector<double> t, current, c_outlet, c_sensed;
};
CycleSeries read_cycle_csv(const std::string& path);

/// `V_ch_V,charge_C,eq_sac_mg_g,lambda`, one row per voltage.
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

/// Dataset with header `V_ch_V,c_feed_mM,charge_C,eq_sac_mg_g[,weight]`.
EquilibriumDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const EquilibriumDataset& data, const std::string& path);

nlohmann::json cycle_metrics(const CycleResult& result);
nlohmann::json equilibrium_json(const EquilibriumPoint& p);
nlohmann::json fit_json(const FitResult& fit);

/// Writes {"metrics": ..., "config": echo} with stable key order.
void write_json(const std::string& path, const nlohmann::json& metrics, const RunConfig& config);

/// Fixed 9-significant-digit rendering used by every CSV writer.
std::string format9(double v);

} // namespace ftecdi::io
