#include "loadmask/metrics/classification.hpp"

#include "loadmask/core/error.hpp"

namespace loadmask::metrics {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

ClassificationReport classification_report(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw ValidationError("classification_report: " + std::to_string(predicted.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " labels");
  ClassificationReport r;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (predicted[k] && truth[k]) ++r.tp;
    else if (predicted[k]) ++r.fp;
    else if (truth[k]) ++r.fn;
    else ++r.tn;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

}  // namespace loadmask::metrics
