#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cycprop {

enum class Variant { full, lp_only, gnn_only };
enum class DeltaMode { fixed, median };

std::string_view to_string(Variant v);
std::string_view to_string(DeltaMode m);
Variant parse_variant(std::string_view text);
DeltaMode parse_delta_mode(std::string_view text);

// Every scalar knob of a run. Defaults: alpha, mu, delta, lambda0, d,
// hidden_dim, neighbor_sample_size and s_neg are the usual settings;
// the rest are this implementation's choices.
struct Hyperparams {
  double alpha = 0.1;            // weight of the context loss in the joint objective
  double mu = 10.0;              // label fitness weight
  double delta = 0.1;            // Gaussian kernel length scale
  double lambda0 = 0.1;          // initial self-paced entropy threshold
  double lambda_growth = 1.25;   // multiplicative growth per outer iteration
  std::optional<double> lambda_cap;  // unset: 0.9 * ln(K)
  double r = 0.5;                // probability of a structure (vs. label) context
  int s_neg = 10;                // negatives per positive
  int batch_size = 512;          // positive anchors per encoder step
  int t1 = 200;                  // encoder steps per outer iteration
  int t2 = 50;                   // propagation steps per outer iteration
  double lr_enc = 1.0;           // scaled by alpha in the encoder step
  double lr_lp = 0.05;
  int d = 64;
  int hidden_dim = 128;
  int neighbor_sample_size = 10;
  int max_outer_iters = 50;
  int patience = 5;
  std::uint64_t seed = 0;
  Variant variant = Variant::full;
  DeltaMode delta_mode = DeltaMode::median;
  bool normalize_attrs = false;
  bool output_relu = false;      // ReLU before the embedding normalization
  double train_fraction = 0.3;
  int val_count = 100;

  double lambda_cap_for(int class_count) const;

  // Throws ValidationError naming the first offending field.
  void validate() const;

  // Applies one `key = value` assignment. Unknown keys throw ValidationError
  // listing the valid ones.
  void set(std::string_view key, std::string_view value);

  // Flat key/value view, in the canonical key order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static const std::vector<std::string_view>& keys();
};

Hyperparams parse_config(std::string_view text);
Hyperparams load_config(const std::filesystem::path& path);

}  // namespace cycprop
