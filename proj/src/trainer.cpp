#include "cycprop/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cycprop/classifier.hpp"
#include "cycprop/errors.hpp"
#include "cycprop/metrics.hpp"
#include "cycprop/noise.hpp"
#include "cycprop/sampler.hpp"

namespace cycprop {

namespace {

constexpr double kImprovement = 1e-4;

double subset_micro_f1(const LabelDistribution& f, const LabelSplit& split,
                       std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  const auto hard = hard_labels(f);
  std::vector<std::int32_t> pred, truth;
  for (auto v : nodes) {
    pred.push_back(hard[v]);
    truth.push_back(split.labels[v]);
  }
  return micro_macro_f1(pred, truth, split.class_count).micro_f1;
}

std::size_t count_selected(std::span<const std::uint8_t> phi) {
  return static_cast<std::size_t>(std::count(phi.begin(), phi.end(), std::uint8_t{1}));
}

TrainResult from_snapshot(const TrainState& s, const Dataset& data, const AttributeMatrix& x) {
  TrainResult r;
  r.history = s.history;
  if (s.has_snapshot) {
    r.f = s.best.f;
    r.embeddings = s.best.embeddings;
    r.selected_iteration = s.best.iteration;
  } else {
    r.f = s.f;
    r.embeddings = embed_all(s.params, data.graph, x);
    r.selected_iteration = 0;
  }
  return r;
}

}  // namespace

double lambda_schedule(const Hyperparams& hp, int class_count, int iterations) {
  return std::min(hp.lambda0 * std::pow(hp.lambda_growth, iterations),
                  hp.lambda_cap_for(class_count));
}

bool converged(std::span<const IterationRecord> history, int patience) {
  if (history.empty()) return false;
  double best = history.front().val_micro_f1;
  int stalled = 1;
  for (std::size_t k = 1; k < history.size(); ++k) {
    const double v = history[k].val_micro_f1;
    if (v > best + kImprovement) {
      stalled = 0;
    } else {
      ++stalled;
    }
    best = std::max(best, v);
  }
  return stalled >= patience;
}

TrainState initialize(const Dataset& data, const LabelSplit& split, const Hyperparams& hp) {
  hp.validate();
  const auto n = data.node_count();
  const auto k = split.class_count;
  if (k < 1) throw InputError("split has no classes");
  if (split.labels.size() != n) throw InputError("split and dataset disagree on node count");

  TrainState s;
  RandomSource master(hp.seed);
  const auto param_seed = master.next_u64();
  s.rng = master.split(1);
  s.params = init_params(static_cast<int>(data.attributes.cols()), hp.hidden_dim, hp.d, param_seed,
                         hp.output_relu);
  s.f = LabelDistribution::Constant(n, k, 1.0 / k);
  s.phi.assign(n, 0);
  for (auto v : split.train) {
    s.f.row(v).setZero();
    s.f(v, split.labels[v]) = 1.0;
    s.phi[v] = 1;
  }
  s.lambda = hp.lambda0;
  return s;
}

TrainResult run(TrainState& s, const Dataset& data, const LabelSplit& split, const Hyperparams& hp,
                const std::function<void(const IterationRecord&)>& on_iteration) {
  hp.validate();
  const AttributeMatrix normalized =
      hp.normalize_attrs ? data.attributes.row_normalized() : AttributeMatrix{};
  const AttributeMatrix& x = hp.normalize_attrs ? normalized : data.attributes;
  const auto& g = data.graph;
  const auto k = split.class_count;
  const auto known = [&] {
    std::vector<std::int32_t> out(g.node_count(), kUnlabeled);
    for (auto v : split.train) out[v] = split.labels[v];
    return out;
  }();
  const auto train_mask = split.train_mask();

  const bool uses_encoder = hp.variant != Variant::lp_only;
  const bool uses_propagation = hp.variant != Variant::gnn_only;
  std::optional<NoiseDistribution> noise;
  if (uses_encoder) noise.emplace(g);
  const SamplerOptions sampler{hp.r, hp.s_neg, hp.batch_size};
  const auto sample_size = static_cast<std::size_t>(hp.neighbor_sample_size);

  // lp-only propagates over fixed raw-attribute weights.
  std::optional<WeightedGraph> raw;
  if (hp.variant == Variant::lp_only) raw = compute_weights(x, g, hp.delta, DeltaMode::median);
  const EmbeddingMatrix fixed_embeddings =
      hp.variant == Variant::lp_only ? embed_all(s.params, g, x) : EmbeddingMatrix{};

  TrainResult aborted_result;
  while (s.iteration < hp.max_outer_iters) {
    const int iter = s.iteration + 1;
    IterationRecord rec;
    rec.iter = iter;
    rec.lambda = s.lambda;
    EmbeddingMatrix embeddings;
    LabelDistribution scores;
    try {
      if (uses_encoder) {
        const auto index = rebuild_label_index(s.phi, hard_labels(s.f), k, *noise);
        double total = 0.0;
        for (int t = 0; t < hp.t1; ++t) {
          const auto batch = sample_batch(g, index, *noise, sampler, s.rng);
          total += train_step(s.params, g, x, batch.pairs, hp.alpha * hp.lr_enc, sample_size, s.rng);
        }
        rec.l_ge = total / hp.t1;
        embeddings = embed_all(s.params, g, x);
      } else {
        embeddings = fixed_embeddings;
      }

      if (uses_propagation) {
        const WeightedGraph weights =
            raw ? *raw : compute_weights(embeddings, g, hp.delta, hp.delta_mode);
        for (int t = 0; t < hp.t2; ++t) {
          const LpTerms terms{weights, known, s.phi, hp.mu};
          s.f = lp_step(s.f, terms, hp.lr_lp);
        }
        s.phi = update_indicator(s.f, s.lambda, train_mask);
        rec.l_lp = lp_objective(s.f, LpTerms{weights, known, s.phi, hp.mu}, s.lambda);
        scores = s.f;
      } else {
        OneVsRestLogistic head;
        head.fit(embeddings, split.train, split.labels, k);
        scores = head.predict_proba(embeddings);
      }
      rec.l_total = rec.l_lp + hp.alpha * rec.l_ge;
      if (!std::isfinite(rec.l_total) || !scores.allFinite()) {
        throw TrainingError("non-finite objective at iteration " + std::to_string(iter));
      }
    } catch (const TrainingError& e) {
      auto r = from_snapshot(s, data, x);
      r.aborted = true;
      r.diagnostic = e.what();
      return r;
    }

    rec.val_micro_f1 = subset_micro_f1(scores, split, split.val);
    rec.phi_count = count_selected(s.phi);
    s.iteration = iter;
    s.lambda = lambda_schedule(hp, k, iter);
    s.history.push_back(rec);
    if (!s.has_snapshot || rec.val_micro_f1 > s.best.metric ||
        (split.val.empty())) {
      s.best = Snapshot{scores, embeddings, rec.val_micro_f1, iter};
      s.has_snapshot = true;
    }
    if (on_iteration) on_iteration(rec);
    if (!split.val.empty() && converged(s.history, hp.patience)) break;
  }
  return from_snapshot(s, data, x);
}

TrainResult train(const Dataset& data, const LabelSplit& split, const Hyperparams& hp,
                  const std::function<void(const IterationRecord&)>& on_iteration) {
  auto state = initialize(data, split, hp);
  return run(state, data, split, hp, on_iteration);
}

}  // namespace cycprop
