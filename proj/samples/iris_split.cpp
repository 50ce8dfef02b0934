// Clusters the Iris measurements with both split rules and prints the cross-tabs.
#include <cstdio>
#include <iostream>

#include "pdgp/divisive.hpp"
#include "pdgp/eval.hpp"
#include "pdgp/io.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : PDGP_DATA_DIR;
  const auto ds = pdgp::load_dense_csv(dir + "/iris.data", pdgp::load_recipe(dir + "/iris.recipe.json"));

  for (const auto strategy : {pdgp::SplitStrategy::pddp(), pdgp::SplitStrategy::pdgp(0.2)}) {
    pdgp::ClusterOptions options;
    options.strategy = strategy;
    const auto tree = pdgp::cluster(ds.matrix, 3, options);
    const auto table = pdgp::contingency(tree.assignment, *ds.labels);
    std::cout << pdgp::to_string(strategy.rule) << '\n';
    for (pdgp::Index r = 0; r < table.cluster_count(); ++r) {
      std::cout << "  cluster " << r << ':';
      for (auto count : table.counts[r]) std::cout << ' ' << count;
      std::cout << '\n';
    }
    std::printf("  entropy %.4f\n", pdgp::normalized_entropy(table));

    if (const auto& gap = tree.root().split->gap) {
      std::printf("  root gap after rank %zu, width %.4f\n", gap->gap_index + 1, gap->gap_width);
    }
  }
}
