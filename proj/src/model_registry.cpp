#include "carbonsched/model_registry.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "carbonsched/digest.hpp"
#include "carbonsched/errors.hpp"
#include "csv.hpp"

namespace carbonsched {

namespace {

constexpr std::string_view kPoolHeader = "name,energy_mj,error_rate_pct";

bool valid_energy(double e) { return e > 0.0; }
bool valid_error(double e) { return e >= 0.0 && e <= 100.0; }

}  // namespace

ModelPool::ModelPool(std::vector<ModelProfile> profiles) : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw std::invalid_argument("model pool is empty");
  std::unordered_set<std::string_view> names;
  for (const auto& p : profiles_) {
    if (p.name.empty()) throw std::invalid_argument("model name is empty");
    if (!names.insert(p.name).second) {
      throw std::invalid_argument("duplicate model name '" + p.name + "'");
    }
    if (!valid_energy(p.energy_mj)) {
      throw std::invalid_argument("non-positive energy for model '" + p.name + "'");
    }
    if (!valid_error(p.error_rate_pct)) {
      throw std::invalid_argument("error rate out of range for model '" + p.name + "'");
    }
  }
  const auto [lo, hi] = std::minmax_element(
      profiles_.begin(), profiles_.end(),
      [](const ModelProfile& a, const ModelProfile& b) { return a.energy_mj < b.energy_mj; });
  bounds_ = {lo->energy_mj, hi->energy_mj};
}

const ModelProfile* ModelPool::find(std::string_view name) const {
  const auto it = std::find_if(profiles_.begin(), profiles_.end(),
                               [&](const ModelProfile& p) { return p.name == name; });
  return it == profiles_.end() ? nullptr : &*it;
}

ModelPool load_pool(std::string_view document) {
  std::vector<ModelProfile> profiles;
  std::unordered_set<std::string> names;
  for (const auto& row : csv::read(document, kPoolHeader)) {
    ModelProfile p;
    p.name = row.fields[0];
    if (p.name.empty()) throw DataError("empty model name", row.line);
    p.energy_mj = csv::parse_real(row.fields[1], row.line, "energy_mj");
    p.error_rate_pct = csv::parse_real(row.fields[2], row.line, "error_rate_pct");
    if (!valid_energy(p.energy_mj)) throw DataError("non-positive energy", row.line);
    if (!valid_error(p.error_rate_pct)) throw DataError("error rate out of range", row.line);
    if (!names.insert(p.name).second) {
      throw DataError("duplicate model name '" + p.name + "'", row.line);
    }
    profiles.push_back(std::move(p));
  }
  if (profiles.empty()) throw DataError("empty model pool");
  return ModelPool(std::move(profiles));
}

ModelPool load_pool_file(const std::filesystem::path& path) {
  return load_pool(read_file(path));
}

std::string to_csv(const ModelPool& pool) {
  std::string out(kPoolHeader);
  out += '\n';
  for (const auto& p : pool.profiles()) {
    out += p.name + ',' + csv::format_real(p.energy_mj) + ',' +
           csv::format_real(p.error_rate_pct) + '\n';
  }
  return out;
}

ModelPool builtin_table1() {
  return ModelPool({
      {"ResNet34", 359.9321833, 8.58},
      {"ResNet50", 420.6213298, 7.138},
      {"ResNet101", 803.0948846, 6.454},
      {"ResNet152", 1238.147188, 5.954},
      {"VGG16", 668.9749319, 9.618},
      {"VGG19", 803.852304, 9.124},
      {"AlexNet", 124.9984724, 20.934},
  });
}

ModelPool builtin_resnet_only() {
  const ModelPool full = builtin_table1();
  std::vector<ModelProfile> resnets;
  for (const auto& p : full.profiles()) {
    if (p.name.rfind("ResNet", 0) == 0) resnets.push_back(p);
  }
  return ModelPool(std::move(resnets));
}

ModelPool builtin_pool(std::string_view name) {
  if (name == "full") return builtin_table1();
  if (name == "resnet" || name == "resnet_only") return builtin_resnet_only();
  throw ConfigError("unknown builtin pool '" + std::string(name) + "' (expected full|resnet)");
}

}  // namespace carbonsched
