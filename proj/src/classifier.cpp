#include "cycprop/classifier.hpp"

#include <cmath>

#include "cycprop/errors.hpp"

namespace cycprop {

namespace {
double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
}  // namespace

void OneVsRestLogistic::fit(const EmbeddingMatrix& features, std::span<const NodeId> rows,
                            std::span<const std::int32_t> labels, std::int32_t class_count,
                            const Options& opts) {
  if (rows.empty()) throw InputError("logistic head needs at least one training row");
  const auto d = features.cols();
  const auto n = static_cast<Eigen::Index>(rows.size());
  // Design matrix with a trailing intercept column.
  Eigen::MatrixXd a(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i).head(d) = features.row(rows[i]);
    a(i, d) = 1.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Ones(d + 1);
  penalty[d] = 0.0;

  weights_.resize(class_count, d);
  intercept_.resize(class_count);
  for (std::int32_t k = 0; k < class_count; ++k) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[rows[i]] == k ? 1.0 : 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    for (int it = 0; it < opts.max_newton_iters; ++it) {
      const Eigen::VectorXd z = a * w;
      Eigen::VectorXd p(n), s(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        p[i] = sigmoid(z[i]);
        s[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
      }
      const Eigen::VectorXd grad = penalty.cwiseProduct(w) + opts.c * a.transpose() * (p - y);
      Eigen::MatrixXd hess = opts.c * a.transpose() * s.asDiagonal() * a;
      hess.diagonal() += penalty;
      hess.diagonal().array() += 1e-10;  // intercept-only direction when penalty is 0
      const Eigen::VectorXd step = hess.ldlt().solve(grad);
      w -= step;
      if (step.lpNorm<Eigen::Infinity>() < opts.tolerance) break;
    }
    weights_.row(k) = w.head(d).transpose();
    intercept_[k] = w[d];
  }
}

LabelDistribution OneVsRestLogistic::predict_proba(const EmbeddingMatrix& features) const {
  LabelDistribution out(features.rows(), weights_.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < weights_.rows(); ++k) {
      out(i, k) = sigmoid(weights_.row(k).dot(features.row(i)) + intercept_[k]);
      total += out(i, k);
    }
    if (total > 0.0) {
      out.row(i) /= total;
    } else {
      out.row(i).setConstant(1.0 / static_cast<double>(weights_.rows()));
    }
  }
  return out;
}

}  // namespace cycprop
