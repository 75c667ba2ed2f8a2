#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cycprop {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // true members
  std::size_t predicted = 0;  // predicted members
};

struct MetricsReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::size_t n_eval = 0;
};

// Multi-class micro/macro F1. Macro averages the classes that occur in the
// truth or in the predictions; per_class covers [0, max(class_count, seen)).
// Throws InputError on a length mismatch or a negative class.
MetricsReport micro_macro_f1(std::span<const std::int32_t> pred,
                             std::span<const std::int32_t> truth, std::int32_t class_count = 0);

}  // namespace cycprop
