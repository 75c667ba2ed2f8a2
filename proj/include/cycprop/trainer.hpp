#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cycprop/config.hpp"
#include "cycprop/dataset.hpp"
#include "cycprop/encoder.hpp"
#include "cycprop/propagation.hpp"

namespace cycprop {

struct IterationRecord {
  int iter = 0;
  double l_lp = 0.0;
  double l_ge = 0.0;
  double l_total = 0.0;  // l_lp + alpha * l_ge
  double val_micro_f1 = 0.0;
  std::size_t phi_count = 0;
  double lambda = 0.0;   // threshold used for this iteration's indicator update
};

struct Snapshot {
  LabelDistribution f;
  EmbeddingMatrix embeddings;
  double metric = 0.0;
  int iteration = 0;  // 0: initialization
};

struct TrainState {
  EncoderParams params;
  LabelDistribution f;
  std::vector<std::uint8_t> phi;
  double lambda = 0.0;
  int iteration = 0;
  std::vector<IterationRecord> history;
  Snapshot best;
  bool has_snapshot = false;
  RandomSource rng;
};

struct TrainResult {
  EmbeddingMatrix embeddings;
  LabelDistribution f;
  std::vector<IterationRecord> history;
  int selected_iteration = 0;
  bool aborted = false;
  std::string diagnostic;
};

// Parameters drawn from the seed, F = one-hot on training nodes and uniform
// elsewhere, phi = training mask, lambda = lambda0.
TrainState initialize(const Dataset& data, const LabelSplit& split, const Hyperparams& hp);

// Alternates encoder and propagation phases until the validation metric
// stalls or max_outer_iters is reached. Returns the best-validation snapshot.
TrainResult run(TrainState& state, const Dataset& data, const LabelSplit& split,
                const Hyperparams& hp,
                const std::function<void(const IterationRecord&)>& on_iteration = {});

TrainResult train(const Dataset& data, const LabelSplit& split, const Hyperparams& hp,
                  const std::function<void(const IterationRecord&)>& on_iteration = {});

// True once the validation metric has gone `patience` consecutive
// iterations without beating the best earlier value by more than 1e-4. The
// first iteration has nothing to beat and counts as a stalled one.
bool converged(std::span<const IterationRecord> history, int patience);

// lambda after `iterations` updates: min(lambda0 * growth^iterations, cap).
double lambda_schedule(const Hyperparams& hp, int class_count, int iterations);

}  // namespace cycprop
