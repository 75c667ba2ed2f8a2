#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "cycprop/encoder.hpp"
#include "cycprop/graph.hpp"
#include "cycprop/propagation.hpp"

namespace cycprop {

// One-vs-rest L2-regularized logistic regression, fitted per class by
// Newton's method. Loss per class: 0.5 ||w||^2 + C * sum log-loss; the
// intercept is not penalized.
class OneVsRestLogistic {
 public:
  struct Options {
    double c = 1.0;
    int max_newton_iters = 50;
    double tolerance = 1e-8;
  };

  void fit(const EmbeddingMatrix& features, std::span<const NodeId> rows,
           std::span<const std::int32_t> labels, std::int32_t class_count, const Options& opts);
  void fit(const EmbeddingMatrix& features, std::span<const NodeId> rows,
           std::span<const std::int32_t> labels, std::int32_t class_count) {
    fit(features, rows, labels, class_count, Options{});
  }

  // Per-class sigmoid scores renormalized to sum to one per row.
  LabelDistribution predict_proba(const EmbeddingMatrix& features) const;

 private:
  Eigen::MatrixXd weights_;    // K x d
  Eigen::VectorXd intercept_;  // K
};

}  // namespace cycprop
