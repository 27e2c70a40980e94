#include "srcpool/operators/graclus.hpp"

#include <algorithm>
#include <numeric>

#include "srcpool/rng.hpp"

namespace srcpool {

std::vector<Index> graclus_matching(const Graph& g, const GraclusConfig& cfg) {
  const Index n = g.num_nodes();
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::vector<std::pair<Index, double>>> nbrs(un);
  for (const Edge& e : g.edges()) {
    nbrs[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.weight);
    nbrs[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.weight);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  const Vector deg = g.degrees();

  std::vector<Index> order(un);
  std::iota(order.begin(), order.end(), Index{0});
  if (cfg.shuffle_seed) {
    Rng rng(*cfg.shuffle_seed);
    for (std::size_t i = un; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }

  std::vector<Index> label(un, -1);
  Index next = 0;
  for (Index i : order) {
    if (label[static_cast<std::size_t>(i)] >= 0) continue;
    Index best = -1;
    double best_score = 0.0;
    for (const auto& [j, w] : nbrs[static_cast<std::size_t>(i)]) {
      if (label[static_cast<std::size_t>(j)] >= 0) continue;
      const double score = w / deg[i] + w / deg[j];
      if (best < 0 || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    label[static_cast<std::size_t>(i)] = next;
    if (best >= 0) label[static_cast<std::size_t>(best)] = next;
    ++next;
  }
  return label;
}

OperatorDescriptor GraclusPooling::descriptor() const {
  return {.trainable = false, .dense = false, .fixed = false, .hierarchical = true,
          .k_policy = AutoK{}};
}

SelectOutput GraclusPooling::select(const Graph& g) const {
  const auto label = graclus_matching(g, cfg_);
  const Index n = g.num_nodes();
  const Index k = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<Index> size(static_cast<std::size_t>(k), 0);
  for (Index l : label) ++size[static_cast<std::size_t>(l)];
  std::vector<Index> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), Index{0});
  Vector scores(n);
  for (Index i = 0; i < n; ++i)
    scores[i] = 1.0 / static_cast<double>(size[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])]);
  return SelectOutput::sparse_index(n, k, std::move(nodes), label, std::move(scores));
}

Matrix GraclusPooling::reduce(const Graph& g, const SelectOutput& sel) const {
  return sel.transpose_times(g.features());
}

Matrix GraclusPooling::connect(const Graph& g, const SelectOutput& sel) const {
  const auto super = sel.supernodes();
  Matrix a = Matrix::Zero(sel.num_supernodes(), sel.num_supernodes());
  std::vector<Index> label(static_cast<std::size_t>(g.num_nodes()));
  for (std::size_t t = 0; t < super.size(); ++t) label[static_cast<std::size_t>(sel.nodes()[t])] = super[t];
  for (const Edge& e : g.edges()) {
    const Index k = label[static_cast<std::size_t>(e.i)];
    const Index l = label[static_cast<std::size_t>(e.j)];
    if (k == l) continue;
    a(k, l) += e.weight;
    a(l, k) += e.weight;
  }
  return a;
}

}  // namespace srcpool
