#include "cycprop/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cycprop/dataset.hpp"
#include "cycprop/errors.hpp"

namespace cycprop {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::lp_only: return "lp-only";
    case Variant::gnn_only: return "gnn-only";
  }
  return "full";
}

std::string_view to_string(DeltaMode m) {
  return m == DeltaMode::fixed ? "fixed" : "median-heuristic";
}

Variant parse_variant(std::string_view text) {
  if (text == "full") return Variant::full;
  if (text == "lp-only") return Variant::lp_only;
  if (text == "gnn-only") return Variant::gnn_only;
  throw ValidationError("variant: expected full | lp-only | gnn-only, got '" + std::string(text) + "'");
}

DeltaMode parse_delta_mode(std::string_view text) {
  if (text == "fixed") return DeltaMode::fixed;
  if (text == "median-heuristic" || text == "median") return DeltaMode::median;
  throw ValidationError("delta_mode: expected fixed | median-heuristic, got '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ValidationError(std::string(key) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError(std::string(key) + ": expected true/false, got '" + std::string(text) + "'");
}

void require(bool ok, std::string_view field, std::string_view rule) {
  if (!ok) throw ValidationError(std::string(field) + " must be " + std::string(rule));
}

}  // namespace

const std::vector<std::string_view>& Hyperparams::keys() {
  static const std::vector<std::string_view> k = {
      "alpha", "mu", "delta", "lambda0", "lambda_growth", "lambda_cap", "r", "s_neg",
      "batch_size", "t1", "t2", "lr_enc", "lr_lp", "d", "hidden_dim",
      "neighbor_sample_size", "max_outer_iters", "patience", "seed", "variant", "delta_mode",
      "normalize_attrs", "output_relu", "train_fraction", "val_count"};
  return k;
}

double Hyperparams::lambda_cap_for(int class_count) const {
  if (lambda_cap) return *lambda_cap;
  return 0.9 * std::log(static_cast<double>(std::max(class_count, 2)));
}

void Hyperparams::validate() const {
  auto finite_positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  require(finite_positive(alpha), "alpha", "> 0");
  require(finite_positive(mu), "mu", "> 0");
  require(finite_positive(delta), "delta", "> 0");
  require(finite_positive(lambda0), "lambda0", "> 0");
  require(std::isfinite(lambda_growth) && lambda_growth >= 1.0, "lambda_growth", ">= 1");
  require(!lambda_cap || finite_positive(*lambda_cap), "lambda_cap", "> 0");
  require(r >= 0.0 && r <= 1.0, "r", "in [0, 1]");
  require(s_neg >= 1, "s_neg", ">= 1");
  require(batch_size >= 1, "batch_size", ">= 1");
  require(t1 >= 1, "t1", ">= 1");
  require(t2 >= 1, "t2", ">= 1");
  require(finite_positive(lr_enc), "lr_enc", "> 0");
  require(finite_positive(lr_lp), "lr_lp", "> 0");
  require(d >= 1, "d", ">= 1");
  require(hidden_dim >= 1, "hidden_dim", ">= 1");
  require(neighbor_sample_size >= 1, "neighbor_sample_size", ">= 1");
  require(max_outer_iters >= 0, "max_outer_iters", ">= 0");
  require(patience >= 1, "patience", ">= 1");
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction", "in (0, 1)");
  require(val_count >= 0, "val_count", ">= 0");
}

void Hyperparams::set(std::string_view key, std::string_view value) {
  if (key == "alpha") alpha = parse_value<double>(key, value);
  else if (key == "mu") mu = parse_value<double>(key, value);
  else if (key == "delta") delta = parse_value<double>(key, value);
  else if (key == "lambda0") lambda0 = parse_value<double>(key, value);
  else if (key == "lambda_growth") lambda_growth = parse_value<double>(key, value);
  else if (key == "lambda_cap") {
    if (value == "auto") lambda_cap.reset();
    else lambda_cap = parse_value<double>(key, value);
  }
  else if (key == "r") r = parse_value<double>(key, value);
  else if (key == "s_neg") s_neg = parse_value<int>(key, value);
  else if (key == "batch_size") batch_size = parse_value<int>(key, value);
  else if (key == "t1") t1 = parse_value<int>(key, value);
  else if (key == "t2") t2 = parse_value<int>(key, value);
  else if (key == "lr_enc") lr_enc = parse_value<double>(key, value);
  else if (key == "lr_lp") lr_lp = parse_value<double>(key, value);
  else if (key == "d") d = parse_value<int>(key, value);
  else if (key == "hidden_dim") hidden_dim = parse_value<int>(key, value);
  else if (key == "neighbor_sample_size") neighbor_sample_size = parse_value<int>(key, value);
  else if (key == "max_outer_iters") max_outer_iters = parse_value<int>(key, value);
  else if (key == "patience") patience = parse_value<int>(key, value);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, value);
  else if (key == "variant") variant = parse_variant(value);
  else if (key == "delta_mode") delta_mode = parse_delta_mode(value);
  else if (key == "normalize_attrs") normalize_attrs = parse_bool(key, value);
  else if (key == "output_relu") output_relu = parse_bool(key, value);
  else if (key == "train_fraction") train_fraction = parse_value<double>(key, value);
  else if (key == "val_count") val_count = parse_value<int>(key, value);
  else {
    std::string msg = "unknown config key '" + std::string(key) + "'; valid keys:";
    for (auto k : keys()) msg += " " + std::string(k);
    throw ValidationError(msg);
  }
}

std::vector<std::pair<std::string, std::string>> Hyperparams::entries() const {
  auto num = [](double v) { return format_double(v); };
  return {
      {"alpha", num(alpha)},
      {"mu", num(mu)},
      {"delta", num(delta)},
      {"lambda0", num(lambda0)},
      {"lambda_growth", num(lambda_growth)},
      {"lambda_cap", lambda_cap ? num(*lambda_cap) : "auto"},
      {"r", num(r)},
      {"s_neg", std::to_string(s_neg)},
      {"batch_size", std::to_string(batch_size)},
      {"t1", std::to_string(t1)},
      {"t2", std::to_string(t2)},
      {"lr_enc", num(lr_enc)},
      {"lr_lp", num(lr_lp)},
      {"d", std::to_string(d)},
      {"hidden_dim", std::to_string(hidden_dim)},
      {"neighbor_sample_size", std::to_string(neighbor_sample_size)},
      {"max_outer_iters", std::to_string(max_outer_iters)},
      {"patience", std::to_string(patience)},
      {"seed", std::to_string(seed)},
      {"variant", std::string(to_string(variant))},
      {"delta_mode", std::string(to_string(delta_mode))},
      {"normalize_attrs", normalize_attrs ? "true" : "false"},
      {"output_relu", output_relu ? "true" : "false"},
      {"train_fraction", num(train_fraction)},
      {"val_count", std::to_string(val_count)},
  };
}

Hyperparams parse_config(std::string_view text) {
  Hyperparams hp;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config", line_no, "expected 'key = value'");
    }
    hp.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  hp.validate();
  return hp;
}

Hyperparams load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cycprop
