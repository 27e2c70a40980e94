#include "srcpool/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace srcpool {

namespace {

void put_double(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

void write_rows(std::ostream& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      put_double(out, m(r, c));
    }
    out << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-blank, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++number_;
      tokens.clear();
      std::string_view rest(line_);
      while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) break;
        rest.remove_prefix(start);
        const auto end = rest.find_first_of(" \t\r");
        tokens.push_back(rest.substr(0, end));
        rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      }
      if (tokens.empty() || tokens.front().front() == '#') continue;
      return true;
    }
    return false;
  }

  int number() const { return number_; }

 private:
  std::istream& in_;
  std::string line_;
  int number_ = 0;
};

template <typename T>
T parse_number(std::string_view tok, int line, const char* what) {
  T value{};
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  }
  return value;
}

Matrix read_block(LineReader& reader, Index rows, Index cols, const char* what) {
  Matrix m(rows, cols);
  std::vector<std::string_view> tok;
  for (Index r = 0; r < rows; ++r) {
    if (!reader.next(tok)) {
      throw ParseError(std::string("unexpected end of file in ") + what + " block", reader.number());
    }
    if (static_cast<Index>(tok.size()) != cols) {
      throw ParseError(std::string(what) + " row has " + std::to_string(tok.size()) +
                           " values, expected " + std::to_string(cols),
                       reader.number());
    }
    for (Index c = 0; c < cols; ++c)
      m(r, c) = parse_number<double>(tok[static_cast<std::size_t>(c)], reader.number(), what);
  }
  return m;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
  const Index d = g.coords() ? g.coords()->cols() : 0;
  out << g.num_nodes() << ' ' << g.num_features() << ' ' << d << '\n';
  write_rows(out, g.features());
  if (g.coords() && d > 0) {
    write_rows(out, *g.coords());
  } else {
    out << "-\n";
  }
  for (const auto& e : g.edges()) {
    out << e.i << ' ' << e.j << ' ';
    put_double(out, e.weight);
    out << '\n';
  }
}

Graph read_graph(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tok;
  if (!reader.next(tok)) throw ParseError("empty graph file", reader.number());
  if (tok.size() != 3) throw ParseError("header must be 'N F d'", reader.number());
  const auto n = parse_number<Index>(tok[0], reader.number(), "node count");
  const auto f = parse_number<Index>(tok[1], reader.number(), "feature count");
  const auto d = parse_number<Index>(tok[2], reader.number(), "coordinate dimension");
  if (n < 0 || f < 0 || d < 0) throw ParseError("negative size in header", reader.number());

  Matrix features = read_block(reader, n, f, "feature");
  std::optional<Matrix> coords;
  if (d > 0) {
    coords = read_block(reader, n, d, "coordinate");
  } else {
    if (!reader.next(tok) || tok.size() != 1 || tok[0] != "-") {
      throw ParseError("expected '-' for absent coordinates", reader.number());
    }
  }

  std::vector<Edge> edges;
  while (reader.next(tok)) {
    const int line = reader.number();
    if (tok.size() != 3) throw ParseError("edge line must be 'i j w'", line);
    const auto i = parse_number<Index>(tok[0], line, "node index");
    const auto j = parse_number<Index>(tok[1], line, "node index");
    const auto w = parse_number<double>(tok[2], line, "edge weight");
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw ParseError("edge index out of range for " + std::to_string(n) + " nodes", line);
    }
    if (i >= j) throw ParseError("edge endpoints must satisfy i < j", line);
    edges.push_back({i, j, w});
  }
  try {
    return Graph(n, std::move(edges), std::move(features), std::move(coords));
  } catch (const GraphError& e) {
    throw ParseError(e.what(), reader.number());
  }
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_graph(out, g);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_graph(in);
}

}  // namespace srcpool
