#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace surq {

// Family of lines z -> intercepts[i] + slopes[i] * z together with the rank
// of the order statistic to track.
struct LineFamily {
  Eigen::VectorXd slopes;
  Eigen::VectorXd intercepts;
  int k = 1;  // 1-based: k-th smallest value
  int size() const { return static_cast<int>(slopes.size()); }
  void validate() const;
};

// Piecewise-constant description of z -> index of the line carrying the
// k-th smallest value. Segment j covers [breakpoints[j-1], breakpoints[j]);
// segments are right-closed on the left, so z == breakpoints[j] belongs to
// segment j+1. Lines that coincide exactly are represented by the smallest
// original index among them.
struct KLevelProfile {
  std::vector<double> breakpoints;
  std::vector<int> segment_index;  // size == breakpoints.size() + 1
  long processed_events = 0;       // diagnostic: queue pops / walk probes

  int index_at(double z) const;
};

// Plane sweep over crossing events of value-adjacent lines. Exact event
// ordering with equal-z batching; O(l^2 log l) worst case. The optional
// window restricts the construction to [z_lo, z_hi]; the first and last
// segments then extend to the window edges.
KLevelProfile compute_klevel(
    const LineFamily& family,
    double z_lo = -std::numeric_limits<double>::infinity(),
    double z_hi = std::numeric_limits<double>::infinity());

// Walks breakpoint to breakpoint, re-selecting the occupant only where the
// current one is crossed; O(l) per probed crossing. Produces bit-identical
// output to compute_klevel.
KLevelProfile compute_klevel_direct(
    const LineFamily& family,
    double z_lo = -std::numeric_limits<double>::infinity(),
    double z_hi = std::numeric_limits<double>::infinity());

}  // namespace surq
