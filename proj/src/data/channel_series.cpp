#include "loadmask/data/channel_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "loadmask/core/error.hpp"
#include "loadmask/core/text.hpp"

namespace loadmask::data {
namespace {

constexpr std::int64_t kMinute = 60;
constexpr std::size_t kMinutesPerDay = 1440;

std::int64_t floor_minute(std::int64_t ts) {
  const std::int64_t q = ts / kMinute;
  return (ts % kMinute < 0 ? q - 1 : q) * kMinute;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  if (line.find(',') != std::string_view::npos) {
    auto f = text::split(line, ',');
    for (auto& x : f) x = text::trim(x);
    return f;
  }
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

bool looks_numeric(std::string_view s) {
  try {
    text::parse_double(s);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

}  // namespace

void ChannelSeries::validate() const {
  if (timestamps.size() != power_kw.size())
    throw ValidationError("channel '" + name + "': timestamp and power arrays differ in length");
  for (std::size_t k = 0; k < size(); ++k) {
    if (k > 0 && timestamps[k] <= timestamps[k - 1])
      throw ValidationError("channel '" + name + "': timestamps not strictly increasing");
    if (!std::isfinite(power_kw[k]) || power_kw[k] < 0.0)
      throw ValidationError("channel '" + name + "': power must be finite and >= 0");
  }
}

void Household::validate_alignment() const {
  aggregate.validate();
  for (const auto& [name, ch] : appliances) {
    ch.validate();
    if (ch.timestamps != aggregate.timestamps)
      throw ValidationError("channel '" + name + "' is not aligned with the aggregate");
  }
}

double Household::dominance_fraction() const {
  if (aggregate.size() == 0) return 1.0;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < aggregate.size(); ++k) {
    double top = 0.0;
    for (const auto& [name, ch] : appliances) top = std::max(top, ch.power_kw[k]);
    if (aggregate.power_kw[k] >= top) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(aggregate.size());
}

ChannelSeries load_channel_csv(const std::filesystem::path& path, const std::string& name) {
  const std::string contents = text::read_file(path);
  std::vector<std::pair<std::int64_t, double>> rows;
  std::vector<std::string> errors;
  std::istringstream in(contents);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto f = fields_of(trimmed);
    if (lineno == 1 && !f.empty() && !looks_numeric(f[0])) continue;  // header
    try {
      if (f.size() != 2) throw ValidationError("expected 2 fields, got " + std::to_string(f.size()));
      const double ts = text::parse_double(f[0]);
      const double watts = text::parse_double(f[1]);
      if (!std::isfinite(ts) || !std::isfinite(watts)) throw ValidationError("non-finite value");
      if (watts < 0.0) throw ValidationError("negative power");
      rows.emplace_back(static_cast<std::int64_t>(std::floor(ts)), watts / 1000.0);
    } catch (const ValidationError& e) {
      errors.push_back(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "malformed rows in " + path.string() + ":";
    for (std::size_t k = 0; k < std::min<std::size_t>(errors.size(), 10); ++k) msg += "\n  " + errors[k];
    if (errors.size() > 10) msg += "\n  ... (" + std::to_string(errors.size() - 10) + " more)";
    throw ValidationError(msg);
  }
  if (rows.empty()) throw ValidationError("empty channel file " + path.string());

  std::ranges::stable_sort(rows, {}, &std::pair<std::int64_t, double>::first);
  ChannelSeries out{name, {}, {}};
  for (std::size_t k = 0; k < rows.size();) {
    std::size_t j = k;
    double sum = 0.0;
    while (j < rows.size() && rows[j].first == rows[k].first) sum += rows[j++].second;
    out.timestamps.push_back(rows[k].first);
    out.power_kw.push_back(sum / static_cast<double>(j - k));
    k = j;
  }
  return out;
}

Household load_wide_csv(const std::filesystem::path& path) {
  const std::string contents = text::read_file(path);
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty wide CSV " + path.string());
  const auto header = text::split(text::trim(line), ',');
  if (header.size() < 2 || text::trim(header[0]) != "timestamp" || text::trim(header[1]) != "aggregate_w")
    throw ValidationError(path.string() + ": header must start with 'timestamp,aggregate_w'");
  std::vector<std::string> names;
  for (std::size_t k = 2; k < header.size(); ++k) {
    auto h = std::string(text::trim(header[k]));
    if (h.size() < 3 || !h.ends_with("_w")) throw ValidationError(path.string() + ": column '" + h + "' must end in _w");
    names.push_back(h.substr(0, h.size() - 2));
  }
  Household hh;
  hh.aggregate.name = "aggregate";
  std::vector<ChannelSeries> apps(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) apps[k].name = names[k];
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto f = text::split(trimmed, ',');
    if (f.size() != header.size())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields");
    try {
      const auto ts = text::parse_int(f[0]);
      hh.aggregate.timestamps.push_back(ts);
      hh.aggregate.power_kw.push_back(text::parse_double(f[1]) / 1000.0);
      for (std::size_t k = 0; k < names.size(); ++k) {
        apps[k].timestamps.push_back(ts);
        apps[k].power_kw.push_back(text::parse_double(f[k + 2]) / 1000.0);
      }
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (hh.aggregate.size() == 0) throw ValidationError("wide CSV " + path.string() + " has no data rows");
  for (auto& a : apps) hh.appliances.emplace(a.name, std::move(a));
  hh.validate_alignment();
  return hh;
}

void write_wide_csv(const std::filesystem::path& path, const Household& household) {
  household.validate_alignment();
  std::string out = "timestamp,aggregate_w";
  for (const auto& [name, ch] : household.appliances) out += "," + name + "_w";
  out += "\n";
  for (std::size_t k = 0; k < household.aggregate.size(); ++k) {
    out += std::to_string(household.aggregate.timestamps[k]);
    out += "," + text::format_double(household.aggregate.power_kw[k] * 1000.0);
    for (const auto& [name, ch] : household.appliances) out += "," + text::format_double(ch.power_kw[k] * 1000.0);
    out += "\n";
  }
  text::write_file_atomic(path, out);
}

ResampleResult resample_1min(const ChannelSeries& series, int gap_limit_minutes) {
  if (series.size() == 0) throw ValidationError("resample_1min: empty series '" + series.name + "'");
  const std::int64_t first = floor_minute(series.timestamps.front());
  const std::int64_t last = floor_minute(series.timestamps.back());
  const auto buckets = static_cast<std::size_t>((last - first) / kMinute + 1);
  std::vector<double> sum(buckets, 0.0);
  std::vector<std::size_t> count(buckets, 0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto b = static_cast<std::size_t>((floor_minute(series.timestamps[k]) - first) / kMinute);
    sum[b] += series.power_kw[k];
    ++count[b];
  }
  ResampleResult r;
  r.series.name = series.name;
  r.series.timestamps.resize(buckets);
  r.series.power_kw.resize(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    r.series.timestamps[b] = first + static_cast<std::int64_t>(b) * kMinute;
    r.series.power_kw[b] = count[b] > 0 ? sum[b] / static_cast<double>(count[b]) : 0.0;
  }
  for (std::size_t b = 0; b < buckets;) {
    if (count[b] > 0) {
      ++b;
      continue;
    }
    std::size_t e = b;
    while (e < buckets && count[e] == 0) ++e;
    const std::size_t gap = e - b;  // never reaches either end: first and last buckets are populated
    if (gap <= static_cast<std::size_t>(gap_limit_minutes)) {
      for (std::size_t k = b; k < e; ++k) r.series.power_kw[k] = r.series.power_kw[b - 1];
    } else {
      r.warnings.push_back("channel '" + series.name + "': " + std::to_string(gap) + "-minute gap at t=" +
                           std::to_string(r.series.timestamps[b]) + " zero-filled");
    }
    b = e;
  }
  return r;
}

Household align_household(const ChannelSeries& aggregate, const std::vector<ChannelSeries>& appliances,
                          int gap_limit_minutes, std::vector<std::string>* warnings) {
  std::vector<ChannelSeries> all;
  auto take = [&](const ChannelSeries& ch) {
    auto r = resample_1min(ch, gap_limit_minutes);
    if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
    all.push_back(std::move(r.series));
  };
  take(aggregate);
  for (const auto& a : appliances) take(a);
  std::int64_t lo = all.front().timestamps.front();
  std::int64_t hi = all.front().timestamps.back();
  for (const auto& ch : all) {
    lo = std::max(lo, ch.timestamps.front());
    hi = std::min(hi, ch.timestamps.back());
  }
  if (lo > hi) throw ValidationError("align_household: channels do not overlap in time");
  auto trim = [&](ChannelSeries& ch) {
    const auto b = static_cast<std::ptrdiff_t>((lo - ch.timestamps.front()) / kMinute);
    const auto n = static_cast<std::ptrdiff_t>((hi - lo) / kMinute + 1);
    ch.timestamps = {ch.timestamps.begin() + b, ch.timestamps.begin() + b + n};
    ch.power_kw = {ch.power_kw.begin() + b, ch.power_kw.begin() + b + n};
  };
  Household hh;
  for (auto& ch : all) trim(ch);
  hh.aggregate = std::move(all.front());
  hh.aggregate.name = "aggregate";
  for (std::size_t k = 1; k < all.size(); ++k) hh.appliances.emplace(all[k].name, std::move(all[k]));
  return hh;
}

std::vector<bool> on_labels(const std::vector<double>& power_kw, double threshold_kw) {
  std::vector<bool> out(power_kw.size());
  for (std::size_t k = 0; k < power_kw.size(); ++k) out[k] = power_kw[k] > threshold_kw;
  return out;
}

std::int64_t day_start(std::chrono::year_month_day date) {
  if (!date.ok()) throw ValidationError("invalid calendar date");
  return std::chrono::sys_seconds(std::chrono::sys_days(date)).time_since_epoch().count();
}

DaySlice make_day(const Household& household, std::chrono::year_month_day date, double on_threshold_kw) {
  return make_day(household, day_start(date), on_threshold_kw);
}

DaySlice make_day(const Household& household, std::int64_t start, double on_threshold_kw) {
  auto cut = [&](const ChannelSeries& ch) {
    if (ch.size() == 0 || ch.timestamps.front() > start ||
        ch.timestamps.back() < start + static_cast<std::int64_t>(kMinutesPerDay - 1) * kMinute)
      throw ValidationError("channel '" + ch.name + "' does not cover the day starting at " + std::to_string(start));
    const auto it = std::ranges::lower_bound(ch.timestamps, start);
    const auto b = it - ch.timestamps.begin();
    for (std::size_t k = 0; k < kMinutesPerDay; ++k)
      if (ch.timestamps[static_cast<std::size_t>(b) + k] != start + static_cast<std::int64_t>(k) * kMinute)
        throw ValidationError("channel '" + ch.name + "' is not on a 1-minute grid for the requested day");
    return std::vector<double>(ch.power_kw.begin() + b, ch.power_kw.begin() + b + kMinutesPerDay);
  };
  DaySlice day;
  day.start_timestamp = start;
  day.demand = cut(household.aggregate);
  for (const auto& [name, ch] : household.appliances) {
    day.appliance_kw[name] = cut(ch);
    day.truth_on[name] = on_labels(day.appliance_kw[name], on_threshold_kw);
  }
  return day;
}

}  // namespace loadmask::data
