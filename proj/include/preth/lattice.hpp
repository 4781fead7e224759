#pragma once

#include <compare>
#include <utility>
#include <vector>

namespace preth {

/// Finite lattice: a set of sites with a symmetric adjacency relation and a
/// uniform on-site Hilbert dimension q. The shipped models are 1-D chains
/// (open or periodic); arbitrary adjacency graphs are accepted.
class Lattice {
 public:
  enum class Kind { chain_open, chain_periodic, general };

  Lattice() = default;

  static Lattice chain(int sites, int local_dim = 2, bool periodic = false);
  static Lattice from_edges(int sites, int local_dim,
                            const std::vector<std::pair<int, int>>& edges);

  int sites() const { return sites_; }
  int local_dim() const { return q_; }
  Kind kind() const { return kind_; }

  const std::vector<int>& neighbors(int site) const { return adj_[site]; }
  bool adjacent(int a, int b) const;

  /// Graph distance between two sites (shortest path; -1 if disconnected).
  int distance(int a, int b) const;

  bool operator==(const Lattice& other) const;
  bool operator!=(const Lattice& other) const { return !(*this == other); }

 private:
  int sites_ = 0;
  int q_ = 2;
  Kind kind_ = Kind::chain_open;
  std::vector<std::vector<int>> adj_;
};

/// Nonempty sorted set of site indices. Potentials key their terms by
/// supports that are connected under the lattice adjacency.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<int> sites);

  int size() const { return static_cast<int>(sites_.size()); }
  bool empty() const { return sites_.empty(); }
  const std::vector<int>& sites() const { return sites_; }
  int operator[](int i) const { return sites_[i]; }
  bool contains(int site) const;

  /// Position of `site` in the ascending tensor order, or -1.
  int index_of(int site) const;

  SupportSet united(const SupportSet& other) const;
  bool intersects(const SupportSet& other) const;

  auto operator<=>(const SupportSet& other) const = default;

 private:
  std::vector<int> sites_;
};

bool is_connected(const SupportSet& s, const Lattice& lat);

/// Smallest connected superset of `sites` under the hull policy: on an open
/// chain the covering interval, on a ring the shorter covering arc (ties
/// resolved toward the smaller start index), on general graphs a greedy
/// shortest-path join.
SupportSet support_hull(const std::vector<int>& sites, const Lattice& lat);

}  // namespace preth
