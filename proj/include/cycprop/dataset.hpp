#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cycprop/graph.hpp"

namespace cycprop {

// Sparse row-major n x m attribute matrix. Stored values are finite; zeros
// are not stored.
class AttributeMatrix {
 public:
  struct Entry {
    std::uint32_t column;
    double value;
    bool operator==(const Entry&) const = default;
  };

  AttributeMatrix() : offsets_{0} {}

  // Rows are appended in order; entries may come unsorted. Duplicate columns
  // in one row are rejected; explicit zeros are dropped. Widens cols() as
  // needed.
  void append_row(std::vector<Entry> entries);

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }
  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }

  void set_cols(std::size_t cols) { cols_ = cols; }
  // Copy with every non-empty row scaled to unit L2 norm.
  AttributeMatrix row_normalized() const;

  static AttributeMatrix from_dense(const std::vector<std::vector<double>>& rows);

  bool operator==(const AttributeMatrix&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
  std::size_t cols_ = 0;
};

// Squared Euclidean distance between two sparse rows.
double squared_distance(std::span<const AttributeMatrix::Entry> a,
                        std::span<const AttributeMatrix::Entry> b);

inline constexpr std::int32_t kUnlabeled = -1;

// Graph, attributes and ground-truth classes over dense node ids [0, n).
// Dense ids are the ranks of the external ids in ascending order.
struct Dataset {
  Graph graph;
  AttributeMatrix attributes;
  std::vector<std::int32_t> labels;  // kUnlabeled where unknown
  std::int32_t class_count = 0;
  std::vector<std::int64_t> external_ids;

  NodeId node_count() const { return graph.node_count(); }
  std::size_t labeled_count() const;
};

// Reads the three text files described in the README. Throws ParseError
// (with line number) on malformed lines and ConsistencyError when the files
// disagree about node ids.
Dataset load_dataset(const std::filesystem::path& graph_path,
                     const std::filesystem::path& attr_path,
                     const std::filesystem::path& label_path);

// Canonical serialization; load(write(x)) reproduces x and write(load(f)) is
// byte-identical for canonical f.
void write_graph(std::ostream& out, const Dataset& data);
void write_attributes(std::ostream& out, const Dataset& data);
void write_labels(std::ostream& out, const Dataset& data);
void write_dataset(const Dataset& data, const std::filesystem::path& graph_path,
                   const std::filesystem::path& attr_path,
                   const std::filesystem::path& label_path);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

struct LabelSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::int32_t class_count = 0;
  std::vector<std::int32_t> labels;  // ground truth, size n

  std::vector<bool> train_mask() const;
};

// Uniform (not stratified) random split of the labeled nodes:
// |train| = round(fraction * labeled), |val| = val_count, test = the rest.
LabelSplit split_labels(std::span<const std::int32_t> labels, std::int32_t class_count,
                        double train_fraction, std::size_t val_count, std::uint64_t seed);

}  // namespace cycprop
