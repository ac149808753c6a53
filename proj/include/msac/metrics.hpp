#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msac/grid.hpp"

namespace msac {

/// TP/FP/Jaccard ratios of an automatic mask against ground truth.
struct SegScores {
  double tp = 0.0;  // |M ∩ A| / |M|
  double fp = 0.0;  // |A \ M| / |M|
  double js = 0.0;  // |M ∩ A| / |M ∪ A|
};

inline SegScores score(const BinaryMask& auto_mask, const BinaryMask& manual_mask) {
  if (!auto_mask.same_size(manual_mask))
    throw std::invalid_argument("score: dimension mismatch");
  long inter = 0, only_a = 0, n_manual = 0;
  for (std::size_t i = 0; i < auto_mask.bits.size(); ++i) {
    const bool a = auto_mask.bits[i] != 0, m = manual_mask.bits[i] != 0;
    n_manual += m;
    if (a && m) ++inter;
    if (a && !m) ++only_a;
  }
  if (n_manual == 0) throw std::invalid_argument("score: empty ground truth");
  SegScores s;
  s.tp = double(inter) / double(n_manual);
  s.fp = double(only_a) / double(n_manual);
  s.js = double(inter) / double(n_manual + only_a);  // union = |M| + |A \ M|
  return s;
}

/// Batch aggregation: per-metric mean and population standard deviation.
struct BatchSummary {
  SegScores mean;
  SegScores stddev;
  std::vector<SegScores> cases;
};

inline BatchSummary summarize(const std::vector<SegScores>& scores) {
  if (scores.empty()) throw std::invalid_argument("summarize: empty score list");
  const double n = double(scores.size());
  BatchSummary b;
  b.cases = scores;
  for (const auto& s : scores) {
    b.mean.tp += s.tp / n;
    b.mean.fp += s.fp / n;
    b.mean.js += s.js / n;
  }
  for (const auto& s : scores) {
    b.stddev.tp += (s.tp - b.mean.tp) * (s.tp - b.mean.tp) / n;
    b.stddev.fp += (s.fp - b.mean.fp) * (s.fp - b.mean.fp) / n;
    b.stddev.js += (s.js - b.mean.js) * (s.js - b.mean.js) / n;
  }
  b.stddev.tp = std::sqrt(b.stddev.tp);
  b.stddev.fp = std::sqrt(b.stddev.fp);
  b.stddev.js = std::sqrt(b.stddev.js);
  return b;
}

/// CSV: header, one row per case, final aggregate row. The aggregate row is
/// labeled with the standard-deviation convention.
inline void write_scores_csv(std::ostream& os, const std::vector<std::string>& case_names,
                             const BatchSummary& summary) {
  if (case_names.size() != summary.cases.size())
    throw std::invalid_argument("write_scores_csv: name/score count mismatch");
  os << "case,tp,fp,js\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < summary.cases.size(); ++i) {
    const auto& s = summary.cases[i];
    os << case_names[i] << ',' << s.tp << ',' << s.fp << ',' << s.js << '\n';
  }
  os << "mean±std(population)," << summary.mean.tp << "±" << summary.stddev.tp << ','
     << summary.mean.fp << "±" << summary.stddev.fp << ',' << summary.mean.js << "±"
     << summary.stddev.js << '\n';
}

}  // namespace msac
