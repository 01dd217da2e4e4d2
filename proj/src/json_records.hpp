#pragma once

#include <cstddef>

#include "carbonsched/traces.hpp"
#include "json.hpp"

namespace carbonsched::detail {

/// `{"from": ISO, "to": ISO, "intensity_g_per_kwh": number}` -> sample.
/// Throws DataError (with `record` as the line) on any violation.
CarbonSample carbon_sample_from_json(const nlohmann::json& record, std::size_t record_no);

}  // namespace carbonsched::detail
