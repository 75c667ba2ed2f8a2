#include "cycprop/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cycprop/baselines.hpp"
#include "cycprop/config.hpp"
#include "cycprop/dataset.hpp"
#include "cycprop/errors.hpp"
#include "cycprop/exports.hpp"
#include "cycprop/metrics.hpp"
#include "cycprop/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cycprop {

namespace {

struct DataFlags {
  std::string config;
  std::string graph;
  std::string attrs;
  std::string labels;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--config", f.config, "key = value hyperparameter file")->check(CLI::ExistingFile);
  cmd->add_option("--graph", f.graph, "edge list")->required()->check(CLI::ExistingFile);
  cmd->add_option("--attrs", f.attrs, "attribute file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--labels", f.labels, "label file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--seed", f.seed, "overrides the config seed");
}

Hyperparams resolve_params(const DataFlags& f) {
  Hyperparams hp = f.config.empty() ? Hyperparams{} : load_config(f.config);
  if (f.seed) hp.seed = *f.seed;
  return hp;
}

template <class Out>
Out open_file(const fs::path& path) {
  Out out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

MetricsReport evaluate(const LabelDistribution& f, const LabelSplit& split) {
  const auto hard = hard_labels(f);
  std::vector<std::int32_t> pred, truth;
  for (auto v : split.test) {
    pred.push_back(hard[v]);
    truth.push_back(split.labels[v]);
  }
  return micro_macro_f1(pred, truth, split.class_count);
}

std::vector<std::int64_t> test_ids(const Dataset& data, const LabelSplit& split) {
  std::vector<std::int64_t> ids;
  for (auto v : split.test) ids.push_back(data.external_ids[v]);
  return ids;
}

LabelSplit make_split(const Dataset& data, const Hyperparams& hp) {
  return split_labels(data.labels, data.class_count, hp.train_fraction,
                      static_cast<std::size_t>(hp.val_count), hp.seed);
}

void write_common(const fs::path& dir, const Dataset& data, const LabelSplit& split,
                  const LabelDistribution& f) {
  auto pred = open_file<std::ofstream>(dir / "predictions.tsv");
  write_predictions(pred, f, data.external_ids);
  auto ids = open_file<std::ofstream>(dir / "test_ids.txt");
  write_ids(ids, test_ids(data, split));
}

int cmd_train(const DataFlags& flags, const std::optional<std::string>& variant) {
  auto hp = resolve_params(flags);
  if (variant) hp.variant = parse_variant(*variant);
  hp.validate();
  const auto data = load_dataset(flags.graph, flags.attrs, flags.labels);
  const auto split = make_split(data, hp);
  const fs::path dir(flags.out);
  fs::create_directories(dir);

  auto history = open_file<std::ofstream>(dir / "history.jsonl");
  const auto result = train(data, split, hp, [&](const IterationRecord& rec) {
    history << history_record(rec).dump() << '\n' << std::flush;
  });

  write_common(dir, data, split, result.f);
  auto emb = open_file<std::ofstream>(dir / "embeddings.tsv");
  write_embeddings(emb, result.embeddings, data.external_ids);
  const auto report = evaluate(result.f, split);
  write_json(dir / "metrics.json",
             metrics_json(report, hp.seed, to_string(hp.variant), config_json(hp)));
  if (result.aborted) {
    std::cerr << "training aborted: " << result.diagnostic << "\n";
    return 1;
  }
  std::cerr << "test micro_f1 " << report.micro_f1 << " macro_f1 " << report.macro_f1
            << " (iteration " << result.selected_iteration << ")\n";
  return 0;
}

int cmd_baseline(const DataFlags& flags, const std::string& method, BaselineConfig cfg) {
  const auto hp = resolve_params(flags);
  cfg.method = method == "gfhf" ? BaselineMethod::gfhf : BaselineMethod::llgc;
  cfg.validate();
  const auto data = load_dataset(flags.graph, flags.attrs, flags.labels);
  const auto split = make_split(data, hp);
  const auto x = hp.normalize_attrs ? data.attributes.row_normalized() : data.attributes;
  const auto result = run_baseline(data.graph, x, split, cfg);
  const fs::path dir(flags.out);
  fs::create_directories(dir);
  write_common(dir, data, split, result.f);
  const auto report = evaluate(result.f, split);
  json config = {{"method", method},
                 {"beta", cfg.beta},
                 {"delta", result.delta},
                 {"max_iters", cfg.max_iters},
                 {"tolerance", cfg.tolerance},
                 {"iterations", result.iterations},
                 {"converged", result.converged},
                 {"train_fraction", hp.train_fraction},
                 {"val_count", hp.val_count}};
  write_json(dir / "metrics.json", metrics_json(report, hp.seed, method, config));
  std::cerr << method << " test micro_f1 " << report.micro_f1 << "\n";
  return 0;
}

json summarize(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {{"mean", mean}, {"std", std::sqrt(ss / n)}, {"runs", xs}};
}

int cmd_sweep(const DataFlags& flags, const std::optional<std::string>& variant,
              const std::string& param, const std::vector<std::string>& values, int repeats) {
  auto base = resolve_params(flags);
  if (variant) base.variant = parse_variant(*variant);
  const auto data = load_dataset(flags.graph, flags.attrs, flags.labels);
  const fs::path dir(flags.out);
  fs::create_directories(dir);

  json entries = json::array();
  bool failed = false;
  for (const auto& value : values) {
    std::vector<double> micro, macro;
    for (int rep = 0; rep < repeats; ++rep) {
      auto hp = base;
      hp.set(param, value);
      hp.seed = base.seed + static_cast<std::uint64_t>(rep);
      hp.validate();
      const auto split = make_split(data, hp);
      const auto result = train(data, split, hp);
      if (result.aborted) {
        std::cerr << param << "=" << value << " repeat " << rep << " aborted: " << result.diagnostic
                  << "\n";
        failed = true;
      }
      const auto report = evaluate(result.f, split);
      micro.push_back(report.micro_f1);
      macro.push_back(report.macro_f1);
      std::cerr << param << "=" << value << " repeat " << rep << " micro_f1 " << report.micro_f1
                << "\n";
    }
    entries.push_back({{"value", std::stod(value)},
                       {"micro_f1", summarize(micro)},
                       {"macro_f1", summarize(macro)}});
  }
  json out = {{"param", param},
              {"repeats", repeats},
              {"seed", base.seed},
              {"variant", to_string(base.variant)},
              {"config", config_json(base)},
              {"entries", entries}};
  write_json(dir / "sweep.json", out);
  return failed ? 1 : 0;
}

std::map<std::int64_t, std::int32_t> read_label_map(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::map<std::int64_t, std::int32_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::int64_t id = 0;
    std::int32_t cls = 0;
    if (!(fields >> id >> cls) || cls < 0) throw ParseError(path.string(), line_no, "expected `id class`");
    labels[id] = cls;
  }
  return labels;
}

int cmd_eval(const std::string& predictions, const std::string& labels, const std::string& ids,
             const std::string& out) {
  const auto rows = read_predictions(predictions);
  const auto truth_map = read_label_map(labels);
  std::map<std::int64_t, std::int32_t> pred_map;
  std::int32_t classes = 0;
  for (const auto& r : rows) {
    pred_map[r.id] = r.label;
    classes = std::max(classes, static_cast<std::int32_t>(r.probabilities.size()));
  }
  std::vector<std::int32_t> pred, truth;
  for (auto id : read_ids(ids)) {
    const auto p = pred_map.find(id);
    const auto t = truth_map.find(id);
    if (p == pred_map.end()) throw ConsistencyError("no prediction for node " + std::to_string(id));
    if (t == truth_map.end()) throw ConsistencyError("no label for node " + std::to_string(id));
    pred.push_back(p->second);
    truth.push_back(t->second);
  }
  const auto report = micro_macro_f1(pred, truth, classes);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_json(path, metrics_json(report, 0, "eval",
                                {{"predictions", predictions}, {"labels", labels}, {"test_ids", ids}}));
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Graph semi-supervised node classification"};
  app.require_subcommand(1);

  DataFlags train_flags;
  std::optional<std::string> train_variant;
  auto* train_cmd = app.add_subcommand("train", "Train and export predictions");
  add_data_flags(train_cmd, train_flags);
  train_cmd->add_option("--variant", train_variant)
      ->check(CLI::IsMember({"full", "lp-only", "gnn-only"}));

  DataFlags base_flags;
  std::string method;
  BaselineConfig base_cfg;
  double delta = 0.0;
  auto* base_cmd = app.add_subcommand("baseline", "Run GFHF or LLGC");
  add_data_flags(base_cmd, base_flags);
  base_cmd->add_option("--method", method)->required()->check(CLI::IsMember({"gfhf", "llgc"}));
  base_cmd->add_option("--beta", base_cfg.beta);
  auto* delta_opt = base_cmd->add_option("--delta", delta, "kernel scale (default: median heuristic)");
  base_cmd->add_option("--max-iters", base_cfg.max_iters);
  base_cmd->add_option("--tolerance", base_cfg.tolerance);

  DataFlags sweep_flags;
  std::optional<std::string> sweep_variant;
  std::string param;
  std::vector<std::string> values;
  int repeats = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat training over parameter values");
  add_data_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--variant", sweep_variant)
      ->check(CLI::IsMember({"full", "lp-only", "gnn-only"}));
  sweep_cmd->add_option("--param", param)->required()->check(CLI::IsMember({"alpha", "d", "lambda0", "r"}));
  sweep_cmd->add_option("--values", values)->required()->delimiter(',')->check(CLI::Number);
  sweep_cmd->add_option("--repeats", repeats)->check(CLI::PositiveNumber);

  std::string predictions, labels, ids, eval_out = "metrics.json";
  auto* eval_cmd = app.add_subcommand("eval", "Score a predictions file");
  eval_cmd->add_option("--predictions", predictions)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", labels)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--test-ids", ids)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_out, "metrics file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags, train_variant);
    if (*base_cmd) {
      if (delta_opt->count()) base_cfg.delta_raw = delta;
      return cmd_baseline(base_flags, method, base_cfg);
    }
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_variant, param, values, repeats);
    if (*eval_cmd) return cmd_eval(predictions, labels, ids, eval_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cycprop
