#include "preth/lattice.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "preth/errors.hpp"

namespace preth {

Lattice Lattice::chain(int sites, int local_dim, bool periodic) {
  if (sites < 1) throw Error("lattice needs at least one site");
  if (local_dim < 2) throw Error("local dimension must be >= 2");
  Lattice lat;
  lat.sites_ = sites;
  lat.q_ = local_dim;
  lat.kind_ = periodic && sites > 2 ? Kind::chain_periodic : Kind::chain_open;
  lat.adj_.assign(sites, {});
  for (int x = 0; x + 1 < sites; ++x) {
    lat.adj_[x].push_back(x + 1);
    lat.adj_[x + 1].push_back(x);
  }
  if (lat.kind_ == Kind::chain_periodic) {
    lat.adj_[sites - 1].push_back(0);
    lat.adj_[0].push_back(sites - 1);
  }
  for (auto& nb : lat.adj_) std::sort(nb.begin(), nb.end());
  return lat;
}

Lattice Lattice::from_edges(int sites, int local_dim,
                            const std::vector<std::pair<int, int>>& edges) {
  if (sites < 1) throw Error("lattice needs at least one site");
  if (local_dim < 2) throw Error("local dimension must be >= 2");
  Lattice lat;
  lat.sites_ = sites;
  lat.q_ = local_dim;
  lat.kind_ = Kind::general;
  lat.adj_.assign(sites, {});
  for (auto [a, b] : edges) {
    if (a == b) throw Error("adjacency must be irreflexive");
    if (a < 0 || b < 0 || a >= sites || b >= sites)
      throw Error("edge site out of range");
    lat.adj_[a].push_back(b);
    lat.adj_[b].push_back(a);
  }
  for (auto& nb : lat.adj_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  if (sites > 1)
    for (int x = 0; x < sites; ++x)
      if (lat.adj_[x].empty()) throw Error("isolated site in lattice");
  return lat;
}

bool Lattice::adjacent(int a, int b) const {
  const auto& nb = adj_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

int Lattice::distance(int a, int b) const {
  if (a == b) return 0;
  std::vector<int> dist(sites_, -1);
  std::deque<int> queue{a};
  dist[a] = 0;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y : adj_[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        if (y == b) return dist[y];
        queue.push_back(y);
      }
    }
  }
  return -1;
}

bool Lattice::operator==(const Lattice& other) const {
  return sites_ == other.sites_ && q_ == other.q_ && kind_ == other.kind_ &&
         adj_ == other.adj_;
}

SupportSet::SupportSet(std::vector<int> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (sites_.empty()) throw Error("support set must be nonempty");
}

bool SupportSet::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

int SupportSet::index_of(int site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) return -1;
  return static_cast<int>(it - sites_.begin());
}

SupportSet SupportSet::united(const SupportSet& other) const {
  std::vector<int> merged;
  merged.reserve(sites_.size() + other.sites_.size());
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(),
                 other.sites_.end(), std::back_inserter(merged));
  return SupportSet(std::move(merged));
}

bool SupportSet::intersects(const SupportSet& other) const {
  auto a = sites_.begin();
  auto b = other.sites_.begin();
  while (a != sites_.end() && b != other.sites_.end()) {
    if (*a == *b) return true;
    if (*a < *b)
      ++a;
    else
      ++b;
  }
  return false;
}

bool is_connected(const SupportSet& s, const Lattice& lat) {
  if (s.empty()) return false;
  if (s.size() == 1) return true;
  std::set<int> members(s.sites().begin(), s.sites().end());
  std::deque<int> queue{s[0]};
  std::set<int> seen{s[0]};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y : lat.neighbors(x)) {
      if (members.count(y) && !seen.count(y)) {
        seen.insert(y);
        queue.push_back(y);
      }
    }
  }
  return static_cast<int>(seen.size()) == s.size();
}

namespace {

SupportSet hull_on_ring(const std::vector<int>& sorted, int L) {
  int m = static_cast<int>(sorted.size());
  if (m == 1) return SupportSet(sorted);
  if (m == L) {
    std::vector<int> all(L);
    for (int i = 0; i < L; ++i) all[i] = i;
    return SupportSet(std::move(all));
  }
  // The minimal covering arc excludes the largest cyclic gap between
  // consecutive occupied sites; ties go to the arc with the smaller start.
  int best_gap = -1, best_i = -1, best_start = L;
  for (int i = 0; i < m; ++i) {
    int cur = sorted[i];
    int next = sorted[(i + 1) % m];
    int gap = (i + 1 < m ? next - cur : next + L - cur) - 1;
    int arc_start = next;  // the arc begins just after the excluded gap
    if (gap > best_gap || (gap == best_gap && arc_start < best_start)) {
      best_gap = gap;
      best_i = i;
      best_start = arc_start;
    }
  }
  // Arc from sorted[best_i + 1] forward (cyclically) to sorted[best_i].
  std::vector<int> arc;
  int start = sorted[(best_i + 1) % m];
  int stop = sorted[best_i];
  for (int x = start;; x = (x + 1) % L) {
    arc.push_back(x);
    if (x == stop) break;
  }
  return SupportSet(std::move(arc));
}

}  // namespace

SupportSet support_hull(const std::vector<int>& sites, const Lattice& lat) {
  if (sites.empty()) throw Error("support hull of empty site set");
  std::vector<int> sorted(sites);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int x : sorted)
    if (x < 0 || x >= lat.sites()) throw Error("site index out of range");

  switch (lat.kind()) {
    case Lattice::Kind::chain_open: {
      std::vector<int> interval;
      for (int x = sorted.front(); x <= sorted.back(); ++x)
        interval.push_back(x);
      return SupportSet(std::move(interval));
    }
    case Lattice::Kind::chain_periodic:
      return hull_on_ring(sorted, lat.sites());
    case Lattice::Kind::general: {
      // Greedy join: repeatedly connect the remaining sites to the growing
      // component through a shortest path.
      std::set<int> hull{sorted.front()};
      std::vector<int> pending(sorted.begin() + 1, sorted.end());
      for (int target : pending) {
        if (hull.count(target)) continue;
        // BFS from the component to the target.
        std::vector<int> parent(lat.sites(), -2);
        std::deque<int> queue;
        for (int x : hull) {
          parent[x] = -1;
          queue.push_back(x);
        }
        int found = -1;
        while (!queue.empty() && found < 0) {
          int x = queue.front();
          queue.pop_front();
          for (int y : lat.neighbors(x)) {
            if (parent[y] == -2) {
              parent[y] = x;
              if (y == target) {
                found = y;
                break;
              }
              queue.push_back(y);
            }
          }
        }
        if (found < 0) throw Error("sites lie in disconnected components");
        for (int x = found; x != -1; x = parent[x]) hull.insert(x);
      }
      return SupportSet(std::vector<int>(hull.begin(), hull.end()));
    }
  }
  throw Error("unreachable");
}

}  // namespace preth
