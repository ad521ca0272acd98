#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mrim/common.hpp"
#include "mrim/rng.hpp"

namespace mrim {

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double p = 0.0;
};

// How edge activation probabilities are assigned on load/generation.
struct WeightScheme {
  enum class Kind { FromFile, Constant, WeightedCascade, Trivalency };

  Kind kind = Kind::FromFile;
  double p = 0.1;           // Constant only
  std::uint64_t seed = 0;   // Trivalency only

  static WeightScheme from_file() { return {Kind::FromFile, 0.0, 0}; }
  static WeightScheme constant(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("constant probability outside [0,1]");
    return {Kind::Constant, p, 0};
  }
  static WeightScheme weighted_cascade() { return {Kind::WeightedCascade, 0.0, 0}; }
  static WeightScheme trivalency(std::uint64_t seed) { return {Kind::Trivalency, 0.0, seed}; }
};

// Immutable weighted directed graph (independent cascade instance).
// Adjacency is CSR in both directions; edge slot positions double as stable
// edge indices for stateless coin flips. Safe to share across threads.
class Graph {
 public:
  struct LoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_merged = 0;
  };

  Graph() = default;

  NodeId n() const { return n_; }
  EdgeId m() const { return m_; }

  std::uint32_t out_degree(NodeId u) const { return out_head_[u + 1] - out_head_[u]; }
  std::uint32_t in_degree(NodeId v) const { return in_head_[v + 1] - in_head_[v]; }

  // CSR slices. out_index(u)+i is the global out-edge index of the i-th edge.
  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_to_.data() + out_head_[u], out_degree(u)};
  }
  std::span<const double> out_probs(NodeId u) const {
    return {out_p_.data() + out_head_[u], out_degree(u)};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return {in_from_.data() + in_head_[v], in_degree(v)};
  }
  std::span<const double> in_probs(NodeId v) const {
    return {in_p_.data() + in_head_[v], in_degree(v)};
  }
  EdgeId out_index(NodeId u) const { return out_head_[u]; }
  EdgeId in_index(NodeId v) const { return in_head_[v]; }

  // Dense id -> id from the input file (identity when input was dense).
  std::uint64_t original_id(NodeId u) const {
    return original_ids_.empty() ? u : original_ids_[u];
  }

  const LoadStats& load_stats() const { return stats_; }

  static Graph from_edges(NodeId n, std::vector<Edge> edges, const WeightScheme& scheme) {
    Graph g;
    g.build(n, std::move(edges), scheme, {});
    return g;
  }

  static Graph load_edge_list(const std::string& path, const WeightScheme& scheme) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list: " + path);
    return load_edge_list(in, scheme);
  }

  static Graph load_edge_list(std::istream& in, const WeightScheme& scheme) {
    std::vector<RawEdge> raw;
    std::size_t line_no = 0;
    std::string line;
    bool have_header = false;
    std::uint64_t header_n = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos) continue;
      if (line[start] == '#') {
        // Optional "# n m" header on the first comment line.
        if (first_content) {
          std::istringstream hs(line.substr(start + 1));
          std::uint64_t hn = 0, hm = 0;
          if (hs >> hn >> hm) {
            have_header = true;
            header_n = hn;
            raw.reserve(hm);
          }
          first_content = false;
        }
        continue;
      }
      first_content = false;
      std::istringstream ls(line);
      std::uint64_t u = 0, v = 0;
      if (!(ls >> u >> v)) throw ParseError("expected 'u v [p]'", line_no);
      double p = 1.0;
      bool has_p = static_cast<bool>(ls >> p);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after 'u v p'", line_no);
      if (scheme.kind == WeightScheme::Kind::FromFile) {
        if (!has_p) throw ParseError("missing probability with FromFile scheme", line_no);
        if (!(p >= 0.0 && p <= 1.0)) throw ParseError("probability outside [0,1]", line_no);
      }
      raw.push_back(RawEdge{u, v, p, line_no});
    }

    // Dense remap: header declares the id space (may include isolated
    // trailing nodes); without it, sorted distinct ids are compacted.
    NodeId n = 0;
    std::vector<std::uint64_t> originals;
    if (have_header) {
      if (header_n > kInvalidNode) throw ParseError("header node count too large");
      n = static_cast<NodeId>(header_n);
      for (const auto& e : raw) {
        if (e.u >= header_n || e.v >= header_n)
          throw ParseError("node id exceeds header node count", e.line);
      }
    } else {
      std::vector<std::uint64_t> ids;
      ids.reserve(raw.size() * 2);
      for (const auto& e : raw) {
        ids.push_back(e.u);
        ids.push_back(e.v);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      if (ids.size() > kInvalidNode) throw ParseError("too many distinct node ids");
      n = static_cast<NodeId>(ids.size());
      bool dense = !ids.empty() && ids.back() == ids.size() - 1;
      if (!dense) originals = ids;
      auto remap = [&](std::uint64_t id) {
        if (originals.empty()) return static_cast<NodeId>(id);
        auto it = std::lower_bound(originals.begin(), originals.end(), id);
        return static_cast<NodeId>(it - originals.begin());
      };
      for (auto& e : raw) {
        e.u = remap(e.u);
        e.v = remap(e.v);
      }
    }

    std::vector<Edge> edges;
    edges.reserve(raw.size());
    std::size_t self_loops = 0;
    for (const auto& e : raw) {
      if (e.u == e.v) {
        ++self_loops;  // self-loops never extend reachability
        continue;
      }
      edges.push_back(Edge{static_cast<NodeId>(e.u), static_cast<NodeId>(e.v), e.p});
    }

    Graph g;
    g.build(n, std::move(edges), scheme, std::move(originals));
    g.stats_.self_loops_dropped = self_loops;
    return g;
  }

  // Directed G(n, p) with p = avg_deg / (n - 1), geometric skip sampling.
  static Graph erdos_renyi(NodeId n, double avg_deg, const WeightScheme& scheme,
                           std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("erdos_renyi needs n >= 2");
    if (avg_deg < 0) throw std::invalid_argument("avg_deg must be non-negative");
    double p = avg_deg / static_cast<double>(n - 1);
    if (p > 1.0) p = 1.0;
    std::vector<Edge> edges;
    if (p > 0.0) {
      Rng rng(derive_seed(seed, 0x45521));
      const double log1mp = std::log1p(-p);
      // Walk the n*(n-1) ordered non-diagonal pairs with geometric gaps.
      const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1);
      std::uint64_t pos = 0;
      bool dense = p >= 1.0;
      while (pos < total) {
        if (!dense) {
          double u = rng.uniform01();
          std::uint64_t skip =
              static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
          if (skip > total - pos) break;
          pos += skip;
          if (pos >= total) break;
        }
        NodeId from = static_cast<NodeId>(pos / (n - 1));
        std::uint64_t col = pos % (n - 1);
        NodeId to = static_cast<NodeId>(col >= from ? col + 1 : col);
        edges.push_back(Edge{from, to, 0.0});
        ++pos;
      }
    }
    Graph g;
    g.build(n, std::move(edges), scheme, {});
    return g;
  }

  // Directed Chung-Lu graph with weight w_i ~ (i+1)^(-1/(exponent-1)),
  // scaled to a mean degree of about 4. Out- and in-weights use independent
  // seeded permutations so hubs differ between the two directions.
  static Graph power_law(NodeId n, double exponent, const WeightScheme& scheme,
                         std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("power_law needs n >= 2");
    if (exponent <= 1.0) throw std::invalid_argument("exponent must exceed 1");
    const double gamma = -1.0 / (exponent - 1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      w[i] = std::pow(static_cast<double>(i) + 1.0, gamma);
      total += w[i];
    }
    const double target_mean_degree = 4.0;
    const double scale = std::sqrt(target_mean_degree * n) / total;
    for (auto& x : w) x *= scale;

    std::vector<NodeId> out_perm(n), in_perm(n);
    for (NodeId i = 0; i < n; ++i) out_perm[i] = in_perm[i] = i;
    Rng perm_rng(derive_seed(seed, 0x9e1));
    for (NodeId i = n; i > 1; --i) {
      std::swap(out_perm[i - 1], out_perm[perm_rng.below(i)]);
      std::swap(in_perm[i - 1], in_perm[perm_rng.below(i)]);
    }

    Rng rng(derive_seed(seed, 0x70a));
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        NodeId u = out_perm[i], v = in_perm[j];
        if (u == v) continue;
        double pe = w[i] * w[j];
        if (pe > 1.0) pe = 1.0;
        if (rng.uniform01() < pe) edges.push_back(Edge{u, v, 0.0});
      }
    }
    Graph g;
    g.build(n, std::move(edges), scheme, {});
    return g;
  }

  // Text round trip is bit exact: probabilities use 17 significant digits.
  void serialize(std::ostream& out) const {
    out << "# " << n_ << ' ' << m_ << '\n';
    char buf[64];
    for (NodeId u = 0; u < n_; ++u) {
      auto nbrs = out_neighbors(u);
      auto probs = out_probs(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%" PRIu64 " %" PRIu64 " %.17g\n",
                      original_id(u), original_id(nbrs[i]), probs[i]);
        out << buf;
      }
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    serialize(out);
  }

 private:
  struct RawEdge {
    std::uint64_t u, v;
    double p;
    std::size_t line;
  };

  void build(NodeId n, std::vector<Edge> edges, const WeightScheme& scheme,
             std::vector<std::uint64_t> originals) {
    for (const auto& e : edges) {
      if (e.from >= n || e.to >= n) throw std::invalid_argument("edge endpoint out of range");
      if (e.from == e.to) throw std::invalid_argument("self-loop reached graph construction");
    }
    // Dedup keeps the max probability: monotone-safe and deterministic.
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      if (a.from != b.from) return a.from < b.from;
      if (a.to != b.to) return a.to < b.to;
      return a.p > b.p;
    });
    std::size_t kept = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (kept > 0 && edges[kept - 1].from == edges[i].from && edges[kept - 1].to == edges[i].to) {
        ++stats_.duplicates_merged;
        continue;
      }
      edges[kept++] = edges[i];
    }
    edges.resize(kept);

    n_ = n;
    m_ = static_cast<EdgeId>(edges.size());
    original_ids_ = std::move(originals);

    out_head_.assign(n_ + 1, 0);
    in_head_.assign(n_ + 1, 0);
    for (const auto& e : edges) {
      ++out_head_[e.from + 1];
      ++in_head_[e.to + 1];
    }
    for (NodeId i = 0; i < n_; ++i) {
      out_head_[i + 1] += out_head_[i];
      in_head_[i + 1] += in_head_[i];
    }

    switch (scheme.kind) {
      case WeightScheme::Kind::FromFile:
        for (const auto& e : edges) {
          if (!(e.p >= 0.0 && e.p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
        }
        break;
      case WeightScheme::Kind::Constant:
        for (auto& e : edges) e.p = scheme.p;
        break;
      case WeightScheme::Kind::WeightedCascade:
        for (auto& e : edges) e.p = 1.0 / static_cast<double>(in_head_[e.to + 1] - in_head_[e.to]);
        break;
      case WeightScheme::Kind::Trivalency: {
        // Per-edge draw keyed by (seed, u, v): independent of edge order.
        static constexpr double kLevels[3] = {0.1, 0.01, 0.001};
        for (auto& e : edges) {
          std::uint64_t h = mix64(derive_seed(scheme.seed, e.from) ^ (e.to + 1));
          e.p = kLevels[h % 3];
        }
        break;
      }
    }

    out_to_.resize(m_);
    out_p_.resize(m_);
    in_from_.resize(m_);
    in_p_.resize(m_);
    std::vector<EdgeId> out_pos(out_head_.begin(), out_head_.end() - 1);
    std::vector<EdgeId> in_pos(in_head_.begin(), in_head_.end() - 1);
    for (const auto& e : edges) {  // edges sorted by (from, to): CSR rows sorted by target
      out_to_[out_pos[e.from]] = e.to;
      out_p_[out_pos[e.from]++] = e.p;
    }
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (edges[a].to != edges[b].to) return edges[a].to < edges[b].to;
      return edges[a].from < edges[b].from;
    });
    for (std::size_t i : order) {
      const auto& e = edges[i];
      in_from_[in_pos[e.to]] = e.from;
      in_p_[in_pos[e.to]++] = e.p;
    }
  }

  NodeId n_ = 0;
  EdgeId m_ = 0;
  std::vector<EdgeId> out_head_, in_head_;
  std::vector<NodeId> out_to_, in_from_;
  std::vector<double> out_p_, in_p_;
  std::vector<std::uint64_t> original_ids_;
  LoadStats stats_;
};

}  // namespace mrim
