#pragma once

#include <filesystem>
#include <iosfwd>

#include "srcpool/graph.hpp"

namespace srcpool {

// Plain-text graph format:
//
//   N F d
//   <N rows of F feature values>
//   <N rows of d coordinate values>   or a single "-" line when d == 0
//   i j w                              one line per undirected edge, 0-based, i < j
//
// Blank lines and lines starting with '#' are ignored. Values are written in
// shortest round-trip form, so load(save(g)) == g bit-exactly.

void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

}  // namespace srcpool
