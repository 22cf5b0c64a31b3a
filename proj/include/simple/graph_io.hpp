#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace simple {

using Index = Eigen::Index;

enum class Indexing { zero_based, one_based };

// Undirected edge, stored with u <= v.
struct Edge {
  Index u = 0;
  Index v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Undirected simple graph on nodes 0..n-1. Edges are deduplicated and sorted
// on construction, so two graphs with the same edge set compare equal.
class Graph {
 public:
  Graph(Index n, std::vector<Edge> edges, bool allows_self_loops);

  Index n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool allows_self_loops() const { return allows_self_loops_; }

  // Self loops count once toward the degree, matching the row sums of the
  // adjacency matrix.
  std::vector<Index> degrees() const;

  bool operator==(const Graph&) const = default;

 private:
  Index n_;
  std::vector<Edge> edges_;
  bool allows_self_loops_;
};

struct LoadOptions {
  Indexing indexing = Indexing::zero_based;
  bool self_loops = false;
  // Declared node count; inferred as max index + 1 when absent.
  std::optional<Index> n;
};

// Whitespace-separated integer pairs, one per line. Blank lines and lines
// starting with '#' or '%' are skipped. Throws DataError with the offending
// line number on malformed input.
Graph parse_edge_list(std::istream& in, const LoadOptions& options,
                      std::string_view source = "<stream>");
Graph load_edge_list(const std::filesystem::path& path,
                     const LoadOptions& options);
void write_edge_list(std::ostream& out, const Graph& g, Indexing indexing);

// Dense symmetric 0/1 matrix. Construction validates symmetry and the
// binary alphabet; the diagonal must be zero unless self loops are allowed.
class SymmetricBinaryMatrix {
 public:
  SymmetricBinaryMatrix(Eigen::MatrixXd entries, bool allows_self_loops);

  Index n() const { return entries_.rows(); }
  const Eigen::MatrixXd& dense() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  bool allows_self_loops() const { return allows_self_loops_; }

 private:
  Eigen::MatrixXd entries_;
  bool allows_self_loops_;
};

SymmetricBinaryMatrix adjacency(const Graph& g);
Graph to_graph(const SymmetricBinaryMatrix& x);

// Largest row sum, the maximum observed degree.
Index max_degree(const SymmetricBinaryMatrix& x);

}  // namespace simple
