#include "loadmask/metrics/report.hpp"

#include <json.hpp>

#include "loadmask/core/error.hpp"

namespace loadmask::metrics {

LeakSummary privacy_leak_summary(const env::EpisodeTrace& trace,
                                 const std::map<std::string, nilm::Seq2PointModel>& models,
                                 const std::map<std::string, std::vector<bool>>& truth) {
  std::vector<double> masked(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) masked[k] = trace[k].masked;
  LeakSummary s;
  for (const auto& [name, model] : models) {
    const auto it = truth.find(name);
    if (it == truth.end()) throw ValidationError("privacy_leak_summary: no truth labels for '" + name + "'");
    auto attack = nilm::attack(model, masked);
    s.reports[name] = classification_report(attack.predicted_on, it->second);
    s.attacks[name] = std::move(attack);
  }
  return s;
}

std::string to_json_text(const ExperimentResult& r) {
  nlohmann::json apps = nlohmann::json::object();
  for (const auto& [name, c] : r.appliances)
    apps[name] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},       {"tn", c.tn},
                  {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
  nlohmann::json j = {{"schema", ExperimentResult::kSchema},
                      {"policy", r.policy},
                      {"lambda", r.lambda ? nlohmann::json(*r.lambda) : nlohmann::json(nullptr)},
                      {"seed", r.seed},
                      {"config_hash", r.config_hash},
                      {"appliances", apps}};
  if (r.cost) {
    j["cost"] = {{"battery_cost", r.cost->battery_cost},
                 {"bill", r.cost->bill},
                 {"remaining_pct", r.cost->remaining_pct},
                 {"battery_final_kwh", r.cost->battery_final},
                 {"compensated_cost", r.cost->compensated_cost}};
  } else {
    j["cost"] = {{"battery_cost", nullptr},
                 {"bill", nullptr},
                 {"remaining_pct", nullptr},
                 {"battery_final_kwh", nullptr},
                 {"compensated_cost", nullptr}};
  }
  return j.dump(2) + "\n";
}

ExperimentResult parse_results_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != ExperimentResult::kSchema)
      throw ValidationError("results.json: unknown schema");
    ExperimentResult r;
    r.policy = j.at("policy").get<std::string>();
    if (r.policy != "pls-dqn" && r.policy != "noop") throw ValidationError("results.json: unknown policy");
    if (!j.at("lambda").is_null()) r.lambda = j.at("lambda").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [name, c] : j.at("appliances").items()) {
      ClassificationReport rep;
      rep.tp = c.at("tp").get<std::size_t>();
      rep.fp = c.at("fp").get<std::size_t>();
      rep.fn = c.at("fn").get<std::size_t>();
      rep.tn = c.at("tn").get<std::size_t>();
      rep.precision = c.at("precision").get<double>();
      rep.recall = c.at("recall").get<double>();
      rep.f1 = c.at("f1").get<double>();
      for (double v : {rep.precision, rep.recall, rep.f1})
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("results.json: score outside [0, 1]");
      r.appliances[name] = rep;
    }
    const auto& jc = j.at("cost");
    if (!jc.at("compensated_cost").is_null()) {
      CostReport c;
      c.battery_cost = jc.at("battery_cost").get<double>();
      c.bill = jc.at("bill").get<double>();
      c.remaining_pct = jc.at("remaining_pct").get<double>();
      c.battery_final = jc.at("battery_final_kwh").get<double>();
      c.compensated_cost = jc.at("compensated_cost").get<double>();
      r.cost = c;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("results.json: ") + e.what());
  }
}

}  // namespace loadmask::metrics
