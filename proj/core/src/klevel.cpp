#include "surq/klevel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace surq {

void LineFamily::validate() const {
  if (slopes.size() == 0) throw std::invalid_argument("klevel: empty family");
  if (slopes.size() != intercepts.size())
    throw std::invalid_argument("klevel: slopes/intercepts size mismatch");
  if (!slopes.allFinite() || !intercepts.allFinite())
    throw std::invalid_argument("klevel: non-finite line coefficients");
  if (k < 1 || k > size())
    throw std::invalid_argument("klevel: rank out of range");
}

int KLevelProfile::index_at(double z) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), z);
  return segment_index[it - breakpoints.begin()];
}

namespace {

// Exactly coincident lines collapse into one group carrying a multiplicity;
// the smallest original index represents the group.
struct Group {
  double a, b;
  int rep;
  int mult;
};

std::vector<Group> collapse_lines(const LineFamily& fam) {
  const int l = fam.size();
  std::vector<int> idx(l);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (fam.slopes[i] != fam.slopes[j]) return fam.slopes[i] < fam.slopes[j];
    if (fam.intercepts[i] != fam.intercepts[j])
      return fam.intercepts[i] < fam.intercepts[j];
    return i < j;
  });
  std::vector<Group> groups;
  for (int i : idx) {
    if (!groups.empty() && groups.back().a == fam.slopes[i] &&
        groups.back().b == fam.intercepts[i]) {
      ++groups.back().mult;
      groups.back().rep = std::min(groups.back().rep, i);
    } else {
      groups.push_back({fam.slopes[i], fam.intercepts[i], i, 1});
    }
  }
  return groups;
}

// Group positions ordered by value just to the right of z_lo. At a finite
// z_lo ties in value resolve by slope (the flatter line stays below going
// right); at -inf the value order is descending slope, then intercept.
std::vector<int> initial_order(const std::vector<Group>& g, double z_lo) {
  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  if (std::isinf(z_lo)) {
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      if (g[i].a != g[j].a) return g[i].a > g[j].a;
      return g[i].b < g[j].b;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      double vi = g[i].b + g[i].a * z_lo;
      double vj = g[j].b + g[j].a * z_lo;
      if (vi != vj) return vi < vj;
      if (g[i].a != g[j].a) return g[i].a < g[j].a;
      return g[i].b < g[j].b;
    });
  }
  return order;
}

double crossing(const Group& below, const Group& above) {
  return (above.b - below.b) / (below.a - above.a);
}

struct Event {
  double z;
  int gi, gj;  // gi below gj when pushed
  bool operator>(const Event& o) const {
    if (z != o.z) return z > o.z;
    if (gi != o.gi) return gi > o.gi;
    return gj > o.gj;
  }
};

}  // namespace

KLevelProfile compute_klevel(const LineFamily& family, double z_lo,
                             double z_hi) {
  family.validate();
  if (!(z_lo < z_hi))
    throw std::invalid_argument("klevel: empty window");

  std::vector<Group> g = collapse_lines(family);
  const int ng = static_cast<int>(g.size());
  std::vector<int> order = initial_order(g, z_lo);
  std::vector<int> pos(ng);
  for (int p = 0; p < ng; ++p) pos[order[p]] = p;

  // Locate the group holding rank k and the count of lines strictly below it.
  int k_pos = 0;
  int cum_before = 0;
  for (;; ++k_pos) {
    if (family.k <= cum_before + g[order[k_pos]].mult) break;
    cum_before += g[order[k_pos]].mult;
  }

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;
  auto push_pair = [&](int p, double min_z, bool strict) {
    if (p < 0 || p + 1 >= ng) return;
    const Group& lo = g[order[p]];
    const Group& hi = g[order[p + 1]];
    if (lo.a <= hi.a) return;  // never crosses going right
    double z = crossing(lo, hi);
    if (!std::isfinite(z)) return;
    if (strict ? (z <= min_z) : (z < min_z)) return;
    heap.push({z, order[p], order[p + 1]});
  };
  for (int p = 0; p + 1 < ng; ++p) push_pair(p, z_lo, true);

  KLevelProfile out;
  out.segment_index.push_back(g[order[k_pos]].rep);

  while (!heap.empty() && heap.top().z <= z_hi) {
    const double zb = heap.top().z;
    while (!heap.empty() && heap.top().z == zb) {
      Event ev = heap.top();
      heap.pop();
      ++out.processed_events;
      int p = pos[ev.gi];
      if (p + 1 >= ng || order[p + 1] != ev.gj) continue;  // stale

      std::swap(order[p], order[p + 1]);
      pos[ev.gj] = p;
      pos[ev.gi] = p + 1;
      if (p <= k_pos && k_pos <= p + 1) {
        int c0 = cum_before - (k_pos == p + 1 ? g[order[p + 1]].mult : 0);
        if (family.k <= c0 + g[order[p]].mult) {
          k_pos = p;
          cum_before = c0;
        } else {
          k_pos = p + 1;
          cum_before = c0 + g[order[p]].mult;
        }
      }
      push_pair(p - 1, zb, false);
      push_pair(p + 1, zb, false);
    }
    if (g[order[k_pos]].rep != out.segment_index.back()) {
      out.breakpoints.push_back(zb);
      out.segment_index.push_back(g[order[k_pos]].rep);
    }
  }
  return out;
}

KLevelProfile compute_klevel_direct(const LineFamily& family, double z_lo,
                                    double z_hi) {
  family.validate();
  if (!(z_lo < z_hi))
    throw std::invalid_argument("klevel: empty window");

  std::vector<Group> g = collapse_lines(family);
  const int ng = static_cast<int>(g.size());
  std::vector<int> order = initial_order(g, z_lo);

  int occ = order[0];
  int below = 0;  // lines strictly below the occupant group, by rank
  for (int p = 0;; ++p) {
    occ = order[p];
    if (family.k <= below + g[occ].mult) break;
    below += g[occ].mult;
  }

  KLevelProfile out;
  out.segment_index.push_back(g[occ].rep);

  double z_cur = z_lo;
  std::vector<int> chunk;
  for (;;) {
    // Nearest crossing of the occupant strictly to the right.
    double z_next = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ng; ++j) {
      if (j == occ || g[j].a == g[occ].a) continue;
      double z = crossing(g[occ], g[j]);
      if (std::isfinite(z) && z > z_cur && z < z_next) z_next = z;
    }
    if (!std::isfinite(z_next) || z_next > z_hi) break;
    ++out.processed_events;

    // All groups meeting the occupant at exactly z_next, ordered as they
    // stand just to the right of it: ascending slope, then intercept.
    chunk.clear();
    chunk.push_back(occ);
    int moved_up = 0;  // members coming from below the occupant
    for (int j = 0; j < ng; ++j) {
      if (j == occ || g[j].a == g[occ].a) continue;
      if (crossing(g[occ], g[j]) == z_next) {
        chunk.push_back(j);
        if (g[j].a > g[occ].a) moved_up += g[j].mult;
      }
    }
    std::sort(chunk.begin(), chunk.end(), [&](int i, int j) {
      if (g[i].a != g[j].a) return g[i].a < g[j].a;
      return g[i].b < g[j].b;
    });

    int cum = below - moved_up;
    int new_occ = -1;
    for (int m : chunk) {
      if (family.k <= cum + g[m].mult) {
        new_occ = m;
        break;
      }
      cum += g[m].mult;
    }
    if (new_occ != occ) {
      out.breakpoints.push_back(z_next);
      out.segment_index.push_back(g[new_occ].rep);
    }
    occ = new_occ;
    below = cum;
    z_cur = z_next;
  }
  return out;
}

}  // namespace surq
