#include "carbonsched/decision_log.hpp"

#include <cerrno>
#include <fstream>
#include <system_error>

#include "carbonsched/digest.hpp"
#include "carbonsched/errors.hpp"

namespace carbonsched {

namespace {

// Length of the prefix that ends with the last newline.
std::uintmax_t complete_prefix_length(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto nl = bytes.rfind('\n');
  return nl == std::string::npos ? 0 : nl + 1;
}

nlohmann::ordered_json window_json(const BoundsWindow& w) {
  nlohmann::ordered_json j;
  j["mode"] = w.mode == BoundsWindow::Mode::whole_trace ? "whole_trace" : "trailing";
  if (w.mode == BoundsWindow::Mode::trailing) j["hours"] = w.hours.count();
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const DecisionLogEntry& e) {
  nlohmann::ordered_json j;
  j["decided_at"] = format_timestamp(e.decided_at);
  j["at"] = format_timestamp(e.at);
  j["c_current"] = e.c_current;
  j["fraction"] = e.fraction;
  j["e_target"] = e.e_target;
  j["model"] = e.model;
  j["mapping"] = std::string(to_string(e.mapping));
  j["bounds"] = {{"c_low", e.bounds.c_low}, {"c_high", e.bounds.c_high}, {"window", window_json(e.window)}};
  j["pool"] = e.pool;
  return j;
}

DecisionLogEntry decision_entry_from_json(const nlohmann::json& j) {
  try {
    DecisionLogEntry e;
    e.decided_at = parse_timestamp(j.at("decided_at").get<std::string>());
    e.at = parse_timestamp(j.at("at").get<std::string>());
    e.c_current = j.at("c_current").get<double>();
    e.fraction = j.at("fraction").get<double>();
    e.e_target = j.at("e_target").get<double>();
    e.model = j.at("model").get<std::string>();
    e.mapping = parse_mapping(j.at("mapping").get<std::string>());
    const auto& b = j.at("bounds");
    e.bounds = {b.at("c_low").get<double>(), b.at("c_high").get<double>()};
    const auto& w = b.at("window");
    if (w.at("mode").get<std::string>() == "trailing") {
      e.window = BoundsWindow::trailing(std::chrono::hours(w.at("hours").get<long>()));
    }
    e.pool = j.at("pool").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed decision log entry: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw DataError(std::string("malformed decision log entry: ") + ex.what());
  } catch (const ConfigError& ex) {
    throw DataError(std::string("malformed decision log entry: ") + ex.what());
  }
}

DecisionLog::DecisionLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_, ec)) {
    const auto size = std::filesystem::file_size(path_, ec);
    if (!ec && size > 0) {
      const auto keep = complete_prefix_length(path_);
      if (keep != size) std::filesystem::resize_file(path_, keep);
    }
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (file_ == nullptr) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open decision log " + path_.string());
  }
  // Unbuffered, so a failed append leaves nothing behind to surface later.
  std::setvbuf(file_, nullptr, _IONBF, 0);
}

DecisionLog::~DecisionLog() {
  if (file_ != nullptr) std::fclose(file_);
}

DecisionLogEntry DecisionLog::append(DecisionLogEntry entry) {
  std::lock_guard lock(mu_);
  if (last_decided_at_ && entry.decided_at < *last_decided_at_) entry.decided_at = *last_decided_at_;
  const std::string line = to_json(entry).dump() + "\n";
  errno = 0;
  const bool ok = std::fwrite(line.data(), 1, line.size(), file_) == line.size() &&
                  std::fflush(file_) == 0;
  if (!ok) {
    const int err = errno != 0 ? errno : EIO;
    std::clearerr(file_);
    throw std::system_error(err, std::generic_category(),
                            "cannot append to decision log " + path_.string());
  }
  last_decided_at_ = entry.decided_at;
  return entry;
}

std::vector<DecisionLogEntry> replay_log(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::vector<DecisionLogEntry> out;
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin < bytes.size()) {
    const std::size_t nl = bytes.find('\n', begin);
    ++line_no;
    if (nl == std::string::npos) break;  // torn tail
    const std::string_view line(bytes.data() + begin, nl - begin);
    begin = nl + 1;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      if (begin >= bytes.size()) break;  // last line, torn mid-write
      throw DataError("malformed decision log line", line_no);
    }
    out.push_back(decision_entry_from_json(j));
  }
  return out;
}

SelectionDecision replay_decision(const DecisionLogEntry& entry, const ModelPool& pool) {
  // A minimal history whose observed bounds are exactly the recorded ones.
  std::vector<CarbonSample> samples;
  const Timestamp at = entry.at;
  if (entry.bounds.c_low == entry.bounds.c_high) {
    samples.push_back({{at, at + std::chrono::seconds(1)}, entry.bounds.c_low});
  } else {
    samples.push_back({{at - std::chrono::seconds(1), at}, entry.bounds.c_low});
    samples.push_back({{at, at + std::chrono::seconds(1)}, entry.bounds.c_high});
  }
  const CarbonTrace history(std::move(samples));
  return decide(entry.c_current, history, at, pool, entry.window, entry.mapping);
}

}  // namespace carbonsched
