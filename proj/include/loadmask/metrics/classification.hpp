#pragma once

#include <cstddef>
#include <vector>

namespace loadmask::metrics {

struct ClassificationReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision/recall/F1 with 0 substituted for any 0/0 ratio.
ClassificationReport classification_report(const std::vector<bool>& predicted, const std::vector<bool>& truth);

/// The harmonic mean used for F1, 0 when precision + recall = 0.
double f1_score(double precision, double recall);

}  // namespace loadmask::metrics
