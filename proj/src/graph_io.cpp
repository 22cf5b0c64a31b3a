#include "simple/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "simple/errors.hpp"

namespace simple {

Graph::Graph(Index n, std::vector<Edge> edges, bool allows_self_loops)
    : n_(n), edges_(std::move(edges)), allows_self_loops_(allows_self_loops) {
  if (n_ <= 0) throw DataError("graph must have at least one node");
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
      throw DataError("edge (" + std::to_string(e.u) + ", " +
                      std::to_string(e.v) + ") outside node range [0, " +
                      std::to_string(n_) + ")");
    }
    if (e.u == e.v && !allows_self_loops_) {
      throw DataError("self loop at node " + std::to_string(e.u) +
                      " but self loops are disabled");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

std::vector<Index> Graph::degrees() const {
  std::vector<Index> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    if (e.u != e.v) ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

namespace {

bool is_comment_or_blank(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  if (pos == std::string::npos) return true;
  return line[pos] == '#' || line[pos] == '%';
}

}  // namespace

Graph parse_edge_list(std::istream& in, const LoadOptions& options,
                      std::string_view source) {
  const Index offset = options.indexing == Indexing::one_based ? 1 : 0;
  std::vector<Edge> edges;
  Index max_index = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    long long a = 0, b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                      ": expected two integer node labels, got '" + line + "'");
    }
    const Index u = static_cast<Index>(a) - offset;
    const Index v = static_cast<Index>(b) - offset;
    if (u < 0 || v < 0) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                      ": node label below the first valid index");
    }
    if (options.n && (u >= *options.n || v >= *options.n)) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                      ": node label exceeds declared node count " +
                      std::to_string(*options.n));
    }
    if (u == v && !options.self_loops) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                      ": self loop but self loops are disabled");
    }
    max_index = std::max({max_index, u, v});
    edges.push_back({u, v});
  }
  const Index n = options.n.value_or(max_index + 1);
  if (n <= 0) throw DataError(std::string(source) + ": empty edge list and no declared node count");
  return Graph(n, std::move(edges), options.self_loops);
}

Graph load_edge_list(const std::filesystem::path& path,
                     const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in, options, path.string());
}

void write_edge_list(std::ostream& out, const Graph& g, Indexing indexing) {
  const Index offset = indexing == Indexing::one_based ? 1 : 0;
  for (const auto& e : g.edges()) out << e.u + offset << ' ' << e.v + offset << '\n';
}

SymmetricBinaryMatrix::SymmetricBinaryMatrix(Eigen::MatrixXd entries,
                                             bool allows_self_loops)
    : entries_(std::move(entries)), allows_self_loops_(allows_self_loops) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DataError("adjacency matrix must be square and nonempty");
  }
  const Index n = entries_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double x = entries_(i, j);
      if (x != 0.0 && x != 1.0) throw DataError("adjacency entries must be 0 or 1");
      if (x != entries_(j, i)) throw DataError("adjacency matrix is not symmetric");
    }
    if (!allows_self_loops_ && entries_(j, j) != 0.0) {
      throw DataError("nonzero diagonal but self loops are disabled");
    }
  }
}

SymmetricBinaryMatrix adjacency(const Graph& g) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (const auto& e : g.edges()) {
    x(e.u, e.v) = 1.0;
    x(e.v, e.u) = 1.0;
  }
  return SymmetricBinaryMatrix(std::move(x), g.allows_self_loops());
}

Graph to_graph(const SymmetricBinaryMatrix& x) {
  std::vector<Edge> edges;
  for (Index j = 0; j < x.n(); ++j)
    for (Index i = 0; i <= j; ++i)
      if (x(i, j) != 0.0) edges.push_back({i, j});
  return Graph(x.n(), std::move(edges), x.allows_self_loops());
}

Index max_degree(const SymmetricBinaryMatrix& x) {
  // Column sums equal row sums by symmetry; columns are contiguous.
  return static_cast<Index>(x.dense().colwise().sum().maxCoeff());
}

}  // namespace simple
