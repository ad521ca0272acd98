#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mrim/common.hpp"

namespace mrim {

// A node selected as seed in a specific round (1-based round index).
struct SeedPair {
  NodeId node;
  std::uint32_t round;

  friend bool operator==(const SeedPair&, const SeedPair&) = default;
  friend auto operator<=>(const SeedPair& a, const SeedPair& b) {
    if (auto c = a.round <=> b.round; c != 0) return c;
    return a.node <=> b.node;
  }
};

// Per-round seed sets S_1..S_T. A node may appear in several rounds; within
// one round nodes are distinct and kept sorted.
class SeedSchedule {
 public:
  SeedSchedule() = default;
  explicit SeedSchedule(std::uint32_t rounds) : per_round_(rounds) {}

  std::uint32_t rounds() const { return static_cast<std::uint32_t>(per_round_.size()); }

  const std::vector<NodeId>& round(std::uint32_t t) const { return per_round_.at(t - 1); }

  std::size_t total_seeds() const {
    std::size_t s = 0;
    for (const auto& r : per_round_) s += r.size();
    return s;
  }

  bool contains(NodeId v, std::uint32_t t) const {
    if (t == 0 || t > rounds()) return false;
    const auto& r = per_round_[t - 1];
    return std::binary_search(r.begin(), r.end(), v);
  }

  // Inserts (v, t); returns false if already present.
  bool add(NodeId v, std::uint32_t t) {
    if (t == 0) throw std::invalid_argument("round indices are 1-based");
    if (t > rounds()) per_round_.resize(t);
    auto& r = per_round_[t - 1];
    auto it = std::lower_bound(r.begin(), r.end(), v);
    if (it != r.end() && *it == v) return false;
    r.insert(it, v);
    return true;
  }

  void set_round(std::uint32_t t, std::vector<NodeId> nodes) {
    if (t == 0) throw std::invalid_argument("round indices are 1-based");
    if (t > rounds()) per_round_.resize(t);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    per_round_[t - 1] = std::move(nodes);
  }

  std::vector<SeedPair> pairs() const {
    std::vector<SeedPair> out;
    out.reserve(total_seeds());
    for (std::uint32_t t = 1; t <= rounds(); ++t)
      for (NodeId v : per_round_[t - 1]) out.push_back({v, t});
    return out;
  }

  // Prefix schedule with rounds 1..t (S^t in pair notation).
  SeedSchedule prefix(std::uint32_t t) const {
    SeedSchedule s;
    s.per_round_.assign(per_round_.begin(), per_round_.begin() + std::min<std::size_t>(t, per_round_.size()));
    return s;
  }

  std::size_t max_round_size() const {
    std::size_t k = 0;
    for (const auto& r : per_round_) k = std::max(k, r.size());
    return k;
  }

  friend bool operator==(const SeedSchedule&, const SeedSchedule&) = default;

  // Text form: one "t v" pair per line, '#' comments ignored.
  void serialize(std::ostream& out) const {
    for (std::uint32_t t = 1; t <= rounds(); ++t)
      for (NodeId v : per_round_[t - 1]) out << t << ' ' << v << '\n';
  }

  static SeedSchedule parse(std::istream& in) {
    SeedSchedule s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::istringstream ls(line);
      std::uint32_t t = 0;
      std::uint64_t v = 0;
      if (!(ls >> t >> v) || t == 0) throw ParseError("expected 'round node'", line_no);
      s.add(static_cast<NodeId>(v), t);
    }
    return s;
  }

 private:
  std::vector<std::vector<NodeId>> per_round_;
};

}  // namespace mrim
