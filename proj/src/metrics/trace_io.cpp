#include "loadmask/metrics/trace_io.hpp"

#include <sstream>

#include "loadmask/core/error.hpp"
#include "loadmask/core/text.hpp"

namespace loadmask::metrics {
namespace {

using text::format_double;

void append_row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
}

void check_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ValidationError("cannot create output directory " + dir.string());
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const env::EpisodeTrace& trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& r : trace) {
    const auto& w = r.reward;
    append_row(out, {std::to_string(r.minute), format_double(r.demand), format_double(r.requested_action),
                     format_double(r.applied_action), format_double(r.delta_b), format_double(r.masked),
                     format_double(r.battery), format_double(r.battery_next), format_double(r.price),
                     r.done ? "1" : "0", format_double(w.privacy_raw), format_double(w.cost_raw),
                     format_double(w.system_raw), format_double(w.battery_raw), format_double(w.privacy_norm),
                     format_double(w.cost_norm), format_double(w.system_norm), format_double(w.total),
                     format_double(w.tau), format_double(w.delta_t), std::to_string(static_cast<int>(w.case_id))});
  }
  text::write_file_atomic(path, out);
}

std::map<std::string, std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                            std::vector<std::string>* header_out) {
  const std::string contents = text::read_file(path);
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV " + path.string());
  std::vector<std::string> header;
  for (auto f : text::split(text::trim(line), ',')) header.emplace_back(text::trim(f));
  std::map<std::string, std::vector<double>> cols;
  for (const auto& h : header) cols[h];
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    if (f.size() != header.size())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": wrong field count");
    for (std::size_t k = 0; k < f.size(); ++k) cols[header[k]].push_back(text::parse_double(f[k]));
  }
  if (header_out) *header_out = header;
  return cols;
}

env::EpisodeTrace read_trace_csv(const std::filesystem::path& path) {
  std::vector<std::string> header;
  auto c = read_numeric_csv(path, &header);
  std::string joined;
  for (const auto& h : header) joined += (joined.empty() ? "" : ",") + h;
  if (joined != kTraceHeader) throw ValidationError(path.string() + ": not a trace CSV");
  const std::size_t n = c["minute"].size();
  env::EpisodeTrace trace(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& r = trace[k];
    r.minute = static_cast<int>(c["minute"][k]);
    r.demand = c["demand_kw"][k];
    r.requested_action = c["requested_kw"][k];
    r.applied_action = c["applied_kw"][k];
    r.delta_b = c["delta_b_kwh"][k];
    r.masked = c["masked_kw"][k];
    r.battery = c["battery_kwh"][k];
    r.battery_next = c["battery_next_kwh"][k];
    r.price = c["price"][k];
    r.done = c["done"][k] != 0.0;
    auto& w = r.reward;
    w.privacy_raw = c["privacy_raw"][k];
    w.cost_raw = c["cost_raw"][k];
    w.system_raw = c["system_raw"][k];
    w.battery_raw = c["battery_raw"][k];
    w.privacy_norm = c["privacy_norm"][k];
    w.cost_norm = c["cost_norm"][k];
    w.system_norm = c["system_norm"][k];
    w.total = c["total"][k];
    w.tau = c["tau"][k];
    w.delta_t = c["delta_t"][k];
    w.case_id = static_cast<reward::PrivacyCase>(static_cast<int>(c["case"][k]));
  }
  return trace;
}

std::vector<std::filesystem::path> export_figures(const env::EpisodeTrace& trace,
                                                  const std::map<std::string, ApplianceAttack>& attacks,
                                                  const std::filesystem::path& out_dir) {
  check_dir(out_dir);
  std::vector<std::filesystem::path> written;
  std::string curves = std::string(kLoadCurvesHeader) + "\n";
  for (const auto& r : trace) append_row(curves, {std::to_string(r.minute), format_double(r.demand), format_double(r.masked)});
  written.push_back(out_dir / "load_curves.csv");
  text::write_file_atomic(written.back(), curves);

  for (const auto& [name, a] : attacks) {
    if (a.true_kw.size() != trace.size() || a.attack.predicted_kw.size() != trace.size())
      throw ValidationError("export_figures: series for '" + name + "' do not match the trace length");
    std::string out = std::string(kDisaggHeader) + "\n";
    for (std::size_t k = 0; k < trace.size(); ++k)
      append_row(out, {std::to_string(trace[k].minute), format_double(a.true_kw[k]),
                       format_double(a.attack.predicted_kw[k]), a.attack.predicted_on[k] ? "1" : "0"});
    written.push_back(out_dir / ("disagg_" + name + ".csv"));
    text::write_file_atomic(written.back(), out);
  }
  return written;
}

void write_predictions_csv(const std::filesystem::path& path, const nilm::AttackOutput& attack,
                           const std::vector<bool>* truth) {
  if (truth && truth->size() != attack.predicted_kw.size())
    throw ValidationError("write_predictions_csv: truth length mismatch");
  std::string out = std::string(kPredictionsHeader) + "\n";
  for (std::size_t k = 0; k < attack.predicted_kw.size(); ++k)
    append_row(out, {std::to_string(k + 1), format_double(attack.predicted_kw[k]), attack.predicted_on[k] ? "1" : "0",
                     truth ? ((*truth)[k] ? "1" : "0") : ""});
  text::write_file_atomic(path, out);
}

}  // namespace loadmask::metrics
