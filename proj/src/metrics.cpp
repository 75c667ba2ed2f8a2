#include "cycprop/metrics.hpp"

#include <algorithm>
#include <string>

#include "cycprop/errors.hpp"

namespace cycprop {

namespace {
double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }
double ratio(std::size_t a, std::size_t b) {
  return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
}
}  // namespace

MetricsReport micro_macro_f1(std::span<const std::int32_t> pred,
                             std::span<const std::int32_t> truth, std::int32_t class_count) {
  if (pred.size() != truth.size()) {
    throw InputError("prediction and truth lengths differ (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(truth.size()) + ")");
  }
  std::int32_t k = class_count;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || truth[i] < 0) throw InputError("class ids must be non-negative");
    k = std::max({k, pred[i] + 1, truth[i] + 1});
  }
  MetricsReport report;
  report.n_eval = pred.size();
  report.per_class.resize(static_cast<std::size_t>(k));
  std::vector<std::size_t> tp(k, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++report.per_class[truth[i]].support;
    ++report.per_class[pred[i]].predicted;
    if (pred[i] == truth[i]) ++tp[truth[i]];
  }
  std::size_t tp_total = 0, pred_total = 0, true_total = 0;
  double macro = 0.0;
  std::size_t present = 0;
  for (std::int32_t c = 0; c < k; ++c) {
    auto& m = report.per_class[c];
    m.precision = ratio(tp[c], m.predicted);
    m.recall = ratio(tp[c], m.support);
    m.f1 = f1_of(m.precision, m.recall);
    tp_total += tp[c];
    pred_total += m.predicted;
    true_total += m.support;
    if (m.support > 0 || m.predicted > 0) {
      macro += m.f1;
      ++present;
    }
  }
  report.micro_f1 = f1_of(ratio(tp_total, pred_total), ratio(tp_total, true_total));
  report.macro_f1 = present > 0 ? macro / static_cast<double>(present) : 0.0;
  return report;
}

}  // namespace cycprop
