// Writes a planted-partition dataset (edges, attributes, labels) to a directory.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cycprop/dataset.hpp"
#include "cycprop/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a stochastic block model dataset"};
  cycprop::SbmOptions opts;
  std::string out;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--blocks", opts.block_sizes, "block sizes")->delimiter(',');
  app.add_option("--p-in", opts.p_in);
  app.add_option("--p-out", opts.p_out);
  app.add_option("--vocabulary", opts.vocabulary);
  app.add_option("--words", opts.words_per_node);
  app.add_option("--signal", opts.signal);
  app.add_option("--seed", opts.seed);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto data = cycprop::make_sbm(opts);
    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    cycprop::write_dataset(data, dir / "graph.tsv", dir / "attrs.tsv", dir / "labels.tsv");
    std::cerr << data.node_count() << " nodes, " << data.graph.edge_count() << " edges\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
