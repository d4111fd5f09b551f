#include "itwa/graphs.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "itwa/errors.hpp"
#include "itwa/random.hpp"

namespace itwa {

RegularGraph::RegularGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ == 0) throw ValidationError("graph must have at least one node");
  std::vector<std::size_t> deg(n_, 0);
  for (auto& [i, j] : edges_) {
    if (i >= n_ || j >= n_) {
      throw ValidationError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") has a node index outside [0, " + std::to_string(n_) + ")");
    }
    if (i == j) throw ValidationError("self-loop at node " + std::to_string(i));
    if (i > j) std::swap(i, j);
    ++deg[i];
    ++deg[j];
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw ValidationError("duplicate edge (" + std::to_string(dup->first) + ", " +
                          std::to_string(dup->second) + ")");
  }
  degree_ = deg[0];
  for (std::size_t v = 0; v < n_; ++v) {
    if (deg[v] != degree_) {
      throw ValidationError("node " + std::to_string(v) + " has degree " + std::to_string(deg[v]) +
                            ", expected uniform degree " + std::to_string(degree_));
    }
  }
  adjacency_.assign(n_ * degree_, 0);
  std::vector<std::size_t> fill(n_, 0);
  for (const auto& [i, j] : edges_) {
    adjacency_[i * degree_ + fill[i]++] = j;
    adjacency_[j * degree_ + fill[j]++] = i;
  }
}

RegularGraph generate_random_regular(std::size_t n, std::size_t k, std::uint64_t seed,
                                     std::size_t max_restarts) {
  if ((n * k) % 2 != 0) {
    throw ValidationError("no " + std::to_string(k) + "-regular graph on " + std::to_string(n) +
                          " nodes: n*k = " + std::to_string(n * k) + " is odd (handshake lemma)");
  }
  if (n <= k) {
    throw ValidationError("a simple " + std::to_string(k) + "-regular graph needs more than " +
                          std::to_string(k) + " nodes");
  }
  std::vector<std::size_t> stubs(n * k);
  for (std::size_t attempt = 0; attempt < max_restarts; ++attempt) {
    for (std::size_t v = 0; v < n; ++v) std::fill_n(stubs.begin() + v * k, k, v);
    CounterRng rng(seed, attempt, 0);
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      std::swap(stubs[i], stubs[rng.below(i + 1)]);
    }
    std::vector<Edge> edges;
    edges.reserve(stubs.size() / 2);
    std::set<Edge> seen;
    bool ok = true;
    for (std::size_t p = 0; p < stubs.size(); p += 2) {
      auto a = stubs[p], b = stubs[p + 1];
      if (a == b) {
        ok = false;
        break;
      }
      if (a > b) std::swap(a, b);
      if (!seen.insert({a, b}).second) {
        ok = false;
        break;
      }
      edges.emplace_back(a, b);
    }
    if (ok) return RegularGraph(n, std::move(edges));
  }
  throw ValidationError("configuration model did not produce a simple graph after " +
                        std::to_string(max_restarts) + " restarts");
}

namespace {

bool parse_index(std::string_view tok, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  throw ValidationError("graph parse error at line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

RegularGraph parse_graph(std::string_view text) {
  bool have_header = false;
  std::size_t n = 0, m = 0;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks.size() != 2) fail_line(line_no, "expected two integers, got '" + std::string(line) + "'");
    std::size_t a, b;
    if (!parse_index(toks[0], a) || !parse_index(toks[1], b)) {
      fail_line(line_no, "non-integer token in '" + std::string(line) + "'");
    }
    if (!have_header) {
      n = a;
      m = b;
      have_header = true;
      edges.reserve(m);
      continue;
    }
    if (a >= n || b >= n) fail_line(line_no, "node index out of range [0, " + std::to_string(n) + ")");
    if (a == b) fail_line(line_no, "self-loop at node " + std::to_string(a));
    edges.emplace_back(a, b);
  }
  if (!have_header) throw ValidationError("graph parse error: missing 'N M' header");
  if (edges.size() != m) {
    throw ValidationError("graph parse error: header declares " + std::to_string(m) + " edges, found " +
                          std::to_string(edges.size()));
  }
  return RegularGraph(n, std::move(edges));
}

std::string serialize_graph(const RegularGraph& g) {
  std::ostringstream os;
  os << g.n() << ' ' << g.edge_count() << '\n';
  for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
  return os.str();
}

RegularGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

void write_graph_file(const RegularGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write graph file '" + path + "'");
  out << serialize_graph(g);
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

std::size_t cut_size(const RegularGraph& g, std::span<const int> s) {
  if (s.size() != g.n()) {
    throw ValidationError("assignment has " + std::to_string(s.size()) + " spins, graph has " +
                          std::to_string(g.n()) + " nodes");
  }
  std::size_t cut = 0;
  for (const auto& [i, j] : g.edges()) cut += (s[i] != s[j]) ? 1 : 0;
  return cut;
}

double config_energy(const RegularGraph& g, std::span<const int> s, double J) {
  const auto cut = cut_size(g, s);
  return J * (static_cast<double>(g.edge_count()) - 2.0 * static_cast<double>(cut));
}

}  // namespace itwa
