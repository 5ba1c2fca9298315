#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadmask/env/episode.hpp"
#include "loadmask/metrics/classification.hpp"
#include "loadmask/metrics/cost.hpp"
#include "loadmask/nilm/seq2point.hpp"

namespace loadmask::metrics {

struct LeakSummary {
  std::map<std::string, ClassificationReport> reports;
  std::map<std::string, nilm::AttackOutput> attacks;
};

/// Attacks the masked column of `trace` with each appliance's model and scores the on/off
/// calls against the day's truth labels.
LeakSummary privacy_leak_summary(const env::EpisodeTrace& trace,
                                 const std::map<std::string, nilm::Seq2PointModel>& models,
                                 const std::map<std::string, std::vector<bool>>& truth);

/// One evaluated (policy, lambda, seed) cell; serialized as results.json.
struct ExperimentResult {
  static constexpr const char* kSchema = "loadmask.results/1";

  std::string policy;  // "pls-dqn" or "noop"
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, ClassificationReport> appliances;
  std::optional<CostReport> cost;  // absent for the unprotected baseline
};

/// Canonical JSON text (sorted keys, fixed formatting): equal results give equal bytes.
std::string to_json_text(const ExperimentResult& result);

/// Parses and schema-checks a results.json document. Throws ValidationError.
ExperimentResult parse_results_json(const std::string& text);

}  // namespace loadmask::metrics
