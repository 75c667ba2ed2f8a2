#include "cycprop/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "cycprop/errors.hpp"
#include "cycprop/random.hpp"

namespace cycprop {

void AttributeMatrix::append_row(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.column < b.column; });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].column == entries[k - 1].column) {
      throw InputError("duplicate attribute column " + std::to_string(entries[k].column));
    }
  }
  for (const auto& e : entries) {
    if (!std::isfinite(e.value)) throw InputError("non-finite attribute value");
    if (e.value != 0.0) entries_.push_back(e);
  }
  offsets_.push_back(entries_.size());
  if (!entries.empty()) cols_ = std::max<std::size_t>(cols_, entries.back().column + 1);
}

AttributeMatrix AttributeMatrix::row_normalized() const {
  AttributeMatrix out = *this;
  for (std::size_t i = 0; i < rows(); ++i) {
    double sq = 0.0;
    for (const auto& e : row(i)) sq += e.value * e.value;
    if (sq <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) out.entries_[k].value *= inv;
  }
  return out;
}

AttributeMatrix AttributeMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  AttributeMatrix out;
  std::size_t cols = 0;
  for (const auto& r : rows) {
    cols = std::max(cols, r.size());
    std::vector<Entry> entries;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (r[c] != 0.0) entries.push_back({static_cast<std::uint32_t>(c), r[c]});
    }
    out.append_row(std::move(entries));
  }
  out.cols_ = cols;
  return out;
}

double squared_distance(std::span<const AttributeMatrix::Entry> a,
                        std::span<const AttributeMatrix::Entry> b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].column < b[j].column)) {
      sum += a[i].value * a[i].value;
      ++i;
    } else if (i == a.size() || b[j].column < a[i].column) {
      sum += b[j].value * b[j].value;
      ++j;
    } else {
      const double d = a[i].value - b[j].value;
      sum += d * d;
      ++i;
      ++j;
    }
  }
  return sum;
}

std::size_t Dataset::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](auto c) { return c != kUnlabeled; }));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path_);
    content_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  // Next line with trailing CR stripped; nullopt at end.
  std::optional<Line> next() {
    if (pos_ >= content_.size()) return std::nullopt;
    auto end = content_.find('\n', pos_);
    if (end == std::string::npos) end = content_.size();
    std::string_view text(content_.data() + pos_, end - pos_);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    pos_ = end + 1;
    return Line{++line_, text};
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string content_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const LineReader& r, const Line& line, const char* what) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(r.path(), line.number,
                     std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(r.path(), line.number, std::string("non-finite ") + what);
    }
  }
  return value;
}

struct RawAttributes {
  std::map<std::int64_t, std::vector<AttributeMatrix::Entry>> rows;
  std::optional<std::size_t> declared_cols;
  std::size_t max_col_plus_one = 0;
};

RawAttributes read_attributes(const std::filesystem::path& path) {
  LineReader reader(path);
  RawAttributes raw;
  enum class Mode { unknown, sparse, dense } mode = Mode::unknown;
  std::size_t dense_width = 0;
  while (auto line = reader.next()) {
    if (is_blank(line->text)) continue;
    if (line->text.front() == '#') {
      const auto body = trim(line->text.substr(1));
      constexpr std::string_view key = "columns=";
      if (body.substr(0, key.size()) == key) {
        raw.declared_cols =
            parse_number<std::size_t>(trim(body.substr(key.size())), reader, *line, "column count");
      }
      continue;
    }
    const auto tab = line->text.find('\t');
    const auto id_text = trim(line->text.substr(0, tab));
    const auto rest =
        tab == std::string_view::npos ? std::string_view{} : trim(line->text.substr(tab + 1));
    const auto id = parse_number<std::int64_t>(id_text, reader, *line, "node id");
    if (mode == Mode::unknown) {
      mode = (rest.empty() || rest.find(':') != std::string_view::npos) ? Mode::sparse : Mode::dense;
    }
    std::vector<AttributeMatrix::Entry> entries;
    if (mode == Mode::sparse) {
      for (auto token : split_ws(rest)) {
        const auto colon = token.find(':');
        if (colon == std::string_view::npos) {
          throw ParseError(reader.path(), line->number,
                           "expected col:val, got '" + std::string(token) + "'");
        }
        const auto col = parse_number<std::uint32_t>(token.substr(0, colon), reader, *line, "column");
        const auto val = parse_number<double>(token.substr(colon + 1), reader, *line, "value");
        entries.push_back({col, val});
      }
    } else {
      std::size_t col = 0;
      std::size_t start = 0;
      while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        if (comma == std::string_view::npos) comma = rest.size();
        const auto val = parse_number<double>(trim(rest.substr(start, comma - start)), reader,
                                              *line, "value");
        entries.push_back({static_cast<std::uint32_t>(col++), val});
        start = comma + 1;
      }
      if (dense_width == 0) dense_width = col;
      if (col != dense_width) {
        throw ParseError(reader.path(), line->number,
                         "dense row has " + std::to_string(col) + " values, expected " +
                             std::to_string(dense_width));
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.column < b.column; });
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (k > 0 && entries[k].column == entries[k - 1].column) {
        throw ParseError(reader.path(), line->number,
                         "duplicate column " + std::to_string(entries[k].column));
      }
      if (raw.declared_cols && entries[k].column >= *raw.declared_cols) {
        throw ParseError(reader.path(), line->number,
                         "column " + std::to_string(entries[k].column) +
                             " outside declared width " + std::to_string(*raw.declared_cols));
      }
      raw.max_col_plus_one = std::max<std::size_t>(raw.max_col_plus_one, entries[k].column + 1);
    }
    if (!raw.rows.emplace(id, std::move(entries)).second) {
      throw ParseError(reader.path(), line->number, "duplicate node id " + std::to_string(id));
    }
  }
  if (mode == Mode::dense) raw.max_col_plus_one = std::max(raw.max_col_plus_one, dense_width);
  return raw;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& graph_path,
                     const std::filesystem::path& attr_path,
                     const std::filesystem::path& label_path) {
  auto raw = read_attributes(attr_path);

  Dataset data;
  data.external_ids.reserve(raw.rows.size());
  std::unordered_map<std::int64_t, NodeId> dense;
  dense.reserve(raw.rows.size());
  AttributeMatrix attrs;
  for (auto& [id, entries] : raw.rows) {
    dense.emplace(id, static_cast<NodeId>(data.external_ids.size()));
    data.external_ids.push_back(id);
    attrs.append_row(std::move(entries));
  }
  attrs.set_cols(raw.declared_cols.value_or(raw.max_col_plus_one));
  data.attributes = std::move(attrs);
  const auto n = static_cast<NodeId>(data.external_ids.size());

  auto lookup = [&](std::int64_t id, const std::string& where) {
    const auto it = dense.find(id);
    if (it == dense.end()) {
      throw ConsistencyError(where + ": node " + std::to_string(id) +
                             " has no row in the attribute file");
    }
    return it->second;
  };

  std::vector<Edge> edges;
  {
    LineReader reader(graph_path);
    while (auto line = reader.next()) {
      if (is_blank(line->text) || trim(line->text).front() == '#') continue;
      const auto fields = split_ws(line->text);
      if (fields.size() != 2) {
        throw ParseError(reader.path(), line->number, "expected 'src<TAB>dst'");
      }
      const auto u = parse_number<std::int64_t>(fields[0], reader, *line, "node id");
      const auto v = parse_number<std::int64_t>(fields[1], reader, *line, "node id");
      const auto where = reader.path() + ":" + std::to_string(line->number);
      edges.emplace_back(lookup(u, where), lookup(v, where));
    }
  }
  data.graph = Graph::from_edges(edges, n);

  data.labels.assign(n, kUnlabeled);
  {
    LineReader reader(label_path);
    while (auto line = reader.next()) {
      if (is_blank(line->text) || trim(line->text).front() == '#') continue;
      const auto fields = split_ws(line->text);
      if (fields.size() != 2) {
        throw ParseError(reader.path(), line->number, "expected 'node_id<TAB>class_id'");
      }
      const auto id = parse_number<std::int64_t>(fields[0], reader, *line, "node id");
      const auto cls = parse_number<std::int32_t>(fields[1], reader, *line, "class id");
      if (cls < 0) throw ParseError(reader.path(), line->number, "class ids must be >= 0");
      const auto v = lookup(id, reader.path() + ":" + std::to_string(line->number));
      if (data.labels[v] != kUnlabeled) {
        throw ParseError(reader.path(), line->number, "duplicate label for node " + std::to_string(id));
      }
      data.labels[v] = cls;
      data.class_count = std::max(data.class_count, cls + 1);
    }
  }
  return data;
}

void write_graph(std::ostream& out, const Dataset& data) {
  for (const auto& [u, v] : data.graph.edge_list()) {
    out << data.external_ids[u] << '\t' << data.external_ids[v] << '\n';
  }
}

void write_attributes(std::ostream& out, const Dataset& data) {
  out << "# columns=" << data.attributes.cols() << '\n';
  for (std::size_t i = 0; i < data.attributes.rows(); ++i) {
    out << data.external_ids[i] << '\t';
    bool first = true;
    for (const auto& e : data.attributes.row(i)) {
      if (!first) out << ' ';
      out << e.column << ':' << format_double(e.value);
      first = false;
    }
    out << '\n';
  }
}

void write_labels(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] != kUnlabeled) out << data.external_ids[i] << '\t' << data.labels[i] << '\n';
  }
}

void write_dataset(const Dataset& data, const std::filesystem::path& graph_path,
                   const std::filesystem::path& attr_path,
                   const std::filesystem::path& label_path) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    return out;
  };
  auto g = open(graph_path);
  write_graph(g, data);
  auto a = open(attr_path);
  write_attributes(a, data);
  auto l = open(label_path);
  write_labels(l, data);
}

std::vector<bool> LabelSplit::train_mask() const {
  std::vector<bool> mask(labels.size(), false);
  for (auto v : train) mask[v] = true;
  return mask;
}

LabelSplit split_labels(std::span<const std::int32_t> labels, std::int32_t class_count,
                        double train_fraction, std::size_t val_count, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train_fraction must lie in (0, 1)");
  }
  std::vector<NodeId> labeled;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] != kUnlabeled) labeled.push_back(static_cast<NodeId>(v));
  }
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(labeled.size())));
  if (n_train == 0 || n_train >= labeled.size() || val_count >= labeled.size() - n_train) {
    throw InputError("cannot split " + std::to_string(labeled.size()) + " labeled nodes into " +
                     std::to_string(n_train) + " train, " + std::to_string(val_count) +
                     " validation and a non-empty test set");
  }
  RandomSource rng(seed);
  shuffle(labeled, rng);

  LabelSplit split;
  split.class_count = class_count;
  split.labels.assign(labels.begin(), labels.end());
  split.train.assign(labeled.begin(), labeled.begin() + n_train);
  split.val.assign(labeled.begin() + n_train, labeled.begin() + n_train + val_count);
  split.test.assign(labeled.begin() + n_train + val_count, labeled.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace cycprop
