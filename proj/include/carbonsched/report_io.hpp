#pragma once

#include <string>

#include "carbonsched/emissions.hpp"
#include "carbonsched/simulator.hpp"
#include "json.hpp"

namespace carbonsched {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const IntervalEmission& e);
ordered_json to_json(const RunSummary& r);
/// `cee` is null (and `undefined_reason` set) when the metric is undefined.
ordered_json to_json(const EfficiencyComparison& c);
ordered_json to_json(const SimulationReport& report);

/// Pretty JSON with a trailing newline. Byte-identical for identical reports.
std::string format_report_json(const SimulationReport& report);

/// One row per (policy, interval):
/// `policy,start_utc,end_utc,model,count,intensity_g_per_kwh,energy_mj,energy_mj_total,carbon_g`
std::string format_report_csv(const SimulationReport& report);

}  // namespace carbonsched
