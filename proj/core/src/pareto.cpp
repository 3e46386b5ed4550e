#include "blockopt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blockopt {

bool dominates(const Point2& a, const Point2& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

double hypervolume_2d(std::span<const Point2> points, const Point2& r) {
  std::vector<Point2> inside;
  inside.reserve(points.size());
  for (const auto& p : points) {
    if (p.f1 < r.f1 && p.f2 < r.f2) inside.push_back(p);
  }
  if (inside.empty()) return 0.0;
  std::sort(inside.begin(), inside.end(), [](const Point2& a, const Point2& b) {
    return a.f1 < b.f1 || (a.f1 == b.f1 && a.f2 < b.f2);
  });
  // Sweep along f1; between consecutive abscissae the dominated height is
  // r2 minus the lowest f2 seen so far.
  double area = 0.0;
  double lowest = inside.front().f2;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    lowest = std::min(lowest, inside[i].f2);
    const double next = i + 1 < inside.size() ? inside[i + 1].f1 : r.f1;
    area += (next - inside[i].f1) * (r.f2 - lowest);
  }
  return area;
}

double hvi(std::span<const Point2> points, const Point2& r, const Point2& cand) {
  if (!(cand.f1 < r.f1 && cand.f2 < r.f2)) return 0.0;
  for (const auto& p : points) {
    if (p.f1 <= cand.f1 && p.f2 <= cand.f2) return 0.0;
  }
  // New area = box [cand, r] minus the part of it already dominated, which is
  // the hypervolume of the members clipped into the box.
  std::vector<Point2> clipped;
  clipped.reserve(points.size());
  for (const auto& p : points) {
    if (p.f1 < r.f1 && p.f2 < r.f2) clipped.push_back({std::max(p.f1, cand.f1), std::max(p.f2, cand.f2)});
  }
  const double box = (r.f1 - cand.f1) * (r.f2 - cand.f2);
  return std::max(0.0, box - hypervolume_2d(clipped, r));
}

ParetoArchive::ParetoArchive(Point2 reference) : reference_(reference) {
  if (!(reference.f1 >= 0.0) || !(reference.f2 >= 0.0)) {
    throw InvalidArgument("reference point coordinates must be non-negative");
  }
}

void ParetoArchive::set_reference(const Point2& r) {
  if (!empty()) throw InvalidArgument("reference point is frozen once the archive is non-empty");
  if (!(r.f1 >= 0.0) || !(r.f2 >= 0.0)) throw InvalidArgument("reference point coordinates must be non-negative");
  reference_ = r;
}

InsertReport ParetoArchive::insert(const BlockSpec& spec, const Point2& point) {
  InsertReport report;
  report.hvi = hvi(points_, reference_, point);
  if (!(report.hvi > 0.0)) {
    report.hvi = 0.0;
    return report;
  }
  std::vector<Point2> kept_points;
  std::vector<BlockSpec> kept_solutions;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (dominates(point, points_[i])) {
      report.evicted.push_back(solutions_[i]);
    } else {
      kept_points.push_back(points_[i]);
      kept_solutions.push_back(solutions_[i]);
    }
  }
  const auto pos = std::upper_bound(kept_points.begin(), kept_points.end(), point,
                                    [](const Point2& a, const Point2& b) { return a.f1 < b.f1; });
  const auto offset = pos - kept_points.begin();
  kept_points.insert(pos, point);
  kept_solutions.insert(kept_solutions.begin() + offset, spec);
  points_ = std::move(kept_points);
  solutions_ = std::move(kept_solutions);
  report.added = true;
  return report;
}

std::vector<std::size_t> non_dominated_indices(std::span<const Point2> points) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].f1 != points[b].f1) return points[a].f1 < points[b].f1;
    if (points[a].f2 != points[b].f2) return points[a].f2 < points[b].f2;
    return a < b;
  });
  // Within a run of equal f1 only the first (lowest f2, earliest index) can
  // survive, and only if it beats every f2 seen at smaller f1.
  std::vector<std::size_t> out;
  double best_f2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < order.size();) {
    const std::size_t head = order[k];
    if (points[head].f2 < best_f2) out.push_back(head);
    best_f2 = std::min(best_f2, points[head].f2);
    while (k < order.size() && points[order[k]].f1 == points[head].f1) ++k;
  }
  return out;
}

}  // namespace blockopt
