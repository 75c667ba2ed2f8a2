#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cycprop/config.hpp"
#include "cycprop/encoder.hpp"
#include "cycprop/metrics.hpp"
#include "cycprop/propagation.hpp"
#include "cycprop/trainer.hpp"

namespace cycprop {

// node_id <TAB> argmax <TAB> p1,p2,...,pK
void write_predictions(std::ostream& out, const LabelDistribution& f,
                       std::span<const std::int64_t> external_ids);
// node_id <TAB> v1 <TAB> ... <TAB> vd
void write_embeddings(std::ostream& out, const EmbeddingMatrix& e,
                      std::span<const std::int64_t> external_ids);
// One JSON object per line.
void write_history(std::ostream& out, std::span<const IterationRecord> history);

nlohmann::json history_record(const IterationRecord& rec);
nlohmann::json metrics_json(const MetricsReport& report, std::uint64_t seed,
                            std::string_view variant, const nlohmann::json& config);
nlohmann::json config_json(const Hyperparams& hp);

struct PredictionRow {
  std::int64_t id = 0;
  std::int32_t label = 0;
  std::vector<double> probabilities;
};

// Parses a predictions file; throws ParseError on malformed lines.
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);
std::vector<std::int64_t> read_ids(const std::filesystem::path& path);
void write_ids(std::ostream& out, std::span<const std::int64_t> ids);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace cycprop
