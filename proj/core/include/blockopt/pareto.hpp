#pragma once

#include <span>
#include <vector>

#include "blockopt/objectives.hpp"

namespace blockopt {

/// A point in the (f1, f2) objective plane; both objectives are minimized.
struct Point2 {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// a <= b in both coordinates and a < b in at least one.
bool dominates(const Point2& a, const Point2& b);

/// Area of the union of boxes [p, r] over all p (clipped to the r-box).
/// Exact sort-and-sweep; dominated or out-of-box points are harmless.
double hypervolume_2d(std::span<const Point2> points, const Point2& r);

/// HV(points + cand, r) - HV(points, r). Exactly zero when cand is weakly
/// dominated by a member or lies on/outside the r-box.
double hvi(std::span<const Point2> points, const Point2& r, const Point2& cand);

struct InsertReport {
  bool added = false;
  double hvi = 0.0;
  std::vector<BlockSpec> evicted;
};

/// Non-dominated archive paired with its solution specs, kept sorted by f1.
class ParetoArchive {
 public:
  explicit ParetoArchive(Point2 reference = {0.0, 0.0});

  const Point2& reference() const { return reference_; }
  /// Only legal while the archive is empty (the reference is frozen by the first insertion).
  void set_reference(const Point2& r);

  /// Adds `point` iff its HVI is strictly positive, evicting members it dominates.
  InsertReport insert(const BlockSpec& spec, const Point2& point);

  std::span<const Point2> points() const { return points_; }
  std::span<const BlockSpec> solutions() const { return solutions_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double hypervolume() const { return hypervolume_2d(points_, reference_); }

  friend bool operator==(const ParetoArchive&, const ParetoArchive&) = default;

 private:
  Point2 reference_;
  std::vector<Point2> points_;
  std::vector<BlockSpec> solutions_;
};

/// Indices of the non-dominated subset, ordered by increasing f1. No reference
/// point is involved; among duplicates only the earliest index is kept.
std::vector<std::size_t> non_dominated_indices(std::span<const Point2> points);

}  // namespace blockopt
