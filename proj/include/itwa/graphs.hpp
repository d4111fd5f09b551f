#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace itwa {

using Edge = std::pair<std::size_t, std::size_t>;

/// Simple k-regular graph on nodes 0..n-1. Edges are stored with i < j in
/// lexicographic order, so equal graphs compare equal.
class RegularGraph {
 public:
  /// Validates the edge list (range, self-loops, duplicates, uniform degree)
  /// and canonicalizes it. Throws ValidationError.
  RegularGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t n() const { return n_; }
  std::size_t degree() const { return degree_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Neighbors of node i (exactly degree() entries).
  std::span<const std::size_t> neighbors(std::size_t i) const {
    return {adjacency_.data() + i * degree_, degree_};
  }

  bool operator==(const RegularGraph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

 private:
  std::size_t n_;
  std::size_t degree_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> adjacency_;
};

/// Classical Ising configuration, entries +1 or -1.
using SpinAssignment = std::vector<int>;

/// Samples a k-regular graph with the configuration (pairing) model, restarting
/// from scratch whenever the pairing creates a self-loop or a multi-edge.
/// Deterministic in `seed`.
RegularGraph generate_random_regular(std::size_t n, std::size_t k, std::uint64_t seed,
                                     std::size_t max_restarts = 100000);

/// Edge-list text format: header "N M", then M lines "i j" with i < j; lines
/// starting with '#' are comments.
RegularGraph parse_graph(std::string_view text);
std::string serialize_graph(const RegularGraph& g);

RegularGraph read_graph_file(const std::string& path);
void write_graph_file(const RegularGraph& g, const std::string& path);

/// Number of edges whose endpoints carry opposite spins.
std::size_t cut_size(const RegularGraph& g, std::span<const int> s);

/// Eigenvalue of H = J sum_edges s_i s_j, i.e. J (|E| - 2 cut).
double config_energy(const RegularGraph& g, std::span<const int> s, double J);

}  // namespace itwa
