#include "cycprop/exports.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cycprop/dataset.hpp"
#include "cycprop/errors.hpp"

namespace cycprop {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

void write_predictions(std::ostream& out, const LabelDistribution& f,
                       std::span<const std::int64_t> external_ids) {
  if (static_cast<std::size_t>(f.rows()) != external_ids.size()) {
    throw InputError("prediction rows and ids differ in length");
  }
  const auto hard = hard_labels(f);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    out << external_ids[i] << '\t' << hard[i] << '\t';
    for (Eigen::Index k = 0; k < f.cols(); ++k) {
      if (k) out << ',';
      out << format_double(f(i, k));
    }
    out << '\n';
  }
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& e,
                      std::span<const std::int64_t> external_ids) {
  if (static_cast<std::size_t>(e.rows()) != external_ids.size()) {
    throw InputError("embedding rows and ids differ in length");
  }
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    out << external_ids[i];
    for (Eigen::Index k = 0; k < e.cols(); ++k) out << '\t' << format_double(e(i, k));
    out << '\n';
  }
}

nlohmann::json history_record(const IterationRecord& rec) {
  return {{"iter", rec.iter},
          {"l_lp", rec.l_lp},
          {"l_ge", rec.l_ge},
          {"l_total", rec.l_total},
          {"val_micro_f1", rec.val_micro_f1},
          {"phi_count", rec.phi_count},
          {"lambda", rec.lambda}};
}

void write_history(std::ostream& out, std::span<const IterationRecord> history) {
  for (const auto& rec : history) out << history_record(rec).dump() << '\n';
}

nlohmann::json config_json(const Hyperparams& hp) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : hp.entries()) cfg[key] = value;
  return cfg;
}

nlohmann::json metrics_json(const MetricsReport& report, std::uint64_t seed,
                            std::string_view variant, const nlohmann::json& config) {
  auto per_class = nlohmann::json::array();
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    const auto& c = report.per_class[k];
    per_class.push_back({{"class", k},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support},
                         {"predicted", c.predicted}});
  }
  return {{"micro_f1", report.micro_f1},
          {"macro_f1", report.macro_f1},
          {"per_class", per_class},
          {"n_eval", report.n_eval},
          {"seed", seed},
          {"variant", variant},
          {"config", config}};
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(path.string(), line_no, "expected 3 tab-separated fields");
    PredictionRow row;
    const std::string_view view(line);
    if (!parse_number(view.substr(0, t1), row.id) ||
        !parse_number(view.substr(t1 + 1, t2 - t1 - 1), row.label)) {
      throw ParseError(path.string(), line_no, "bad node id or class");
    }
    std::string_view rest = view.substr(t2 + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      double p = 0.0;
      if (!parse_number(rest.substr(0, comma), p)) {
        throw ParseError(path.string(), line_no, "bad probability");
      }
      row.probabilities.push_back(p);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::int64_t> read_ids(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::int64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token) || token[0] == '#') continue;
    std::int64_t id = 0;
    if (!parse_number(std::string_view(token), id)) throw ParseError(path.string(), line_no, "bad node id");
    ids.push_back(id);
  }
  return ids;
}

void write_ids(std::ostream& out, std::span<const std::int64_t> ids) {
  for (auto id : ids) out << id << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

}  // namespace cycprop
