#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include <blockopt/error.hpp>
#include <blockopt/pareto.hpp>
#include <blockopt/rng.hpp>

namespace blockopt {
namespace {

// Union area by coordinate compression: every cell of the induced grid is
// either fully covered or not.
double hv_by_cells(const std::vector<Point2>& pts, const Point2& r) {
  std::vector<double> xs{r.f1}, ys{r.f2};
  for (const auto& p : pts) {
    xs.push_back(std::min(p.f1, r.f1));
    ys.push_back(std::min(p.f2, r.f2));
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]), cy = 0.5 * (ys[j] + ys[j + 1]);
      const bool covered = std::any_of(pts.begin(), pts.end(), [&](const Point2& p) {
        return p.f1 <= cx && p.f2 <= cy;
      });
      if (covered) area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return area;
}

TEST(Pareto, Dominance) {
  EXPECT_TRUE(dominates({1, 1}, {2, 2}));
  EXPECT_TRUE(dominates({1, 2}, {1, 3}));
  EXPECT_FALSE(dominates({1, 1}, {1, 1}));
  EXPECT_FALSE(dominates({1, 2}, {2, 1}));
}

TEST(Pareto, HypervolumeWorkedExamples) {
  const std::vector<Point2> one{{1, 1}};
  EXPECT_EQ(hypervolume_2d(one, {2, 2}), 1.0);
  const std::vector<Point2> two{{1, 2}, {2, 1}};
  EXPECT_EQ(hypervolume_2d(two, {3, 3}), 3.0);
  EXPECT_EQ(hypervolume_2d({}, {3, 3}), 0.0);
}

TEST(Pareto, HypervolumeMatchesCellDecomposition) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> pts(1 + rng.uniform_int(0, 15));
    for (auto& p : pts) p = {rng.uniform() * 1.2, rng.uniform() * 1.2};
    const Point2 r{1.0, 1.0};
    EXPECT_NEAR(hypervolume_2d(pts, r), hv_by_cells(pts, r), 1e-12);
  }
}

TEST(Pareto, HviExamples) {
  const std::vector<Point2> p{{1, 1}};
  EXPECT_DOUBLE_EQ(hvi(p, {2, 2}, {0.5, 0.5}), 1.25);
  EXPECT_EQ(hvi(p, {2, 2}, {1.5, 1.5}), 0.0);
  EXPECT_EQ(hvi(p, {2, 2}, {1, 1}), 0.0);
  EXPECT_EQ(hvi(p, {2, 2}, {0.5, 2.0}), 0.0);
  EXPECT_EQ(hvi({}, {2, 2}, {2.5, 0.1}), 0.0);
}

TEST(Pareto, HviIsDifferenceOfVolumes) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> pts(rng.uniform_int(0, 10));
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    const Point2 r{0.9, 0.9};
    const Point2 c{rng.uniform(), rng.uniform()};
    auto with = pts;
    with.push_back(c);
    EXPECT_NEAR(hvi(pts, r, c), hv_by_cells(with, r) - hv_by_cells(pts, r), 1e-12);
  }
}

TEST(Pareto, ArchiveInsertAndEvict) {
  ParetoArchive a({2, 2});
  EXPECT_TRUE(a.insert(BlockSpec{1}, {1, 1}).added);
  const auto rep = a.insert(BlockSpec{2}, {0.5, 0.5});
  EXPECT_TRUE(rep.added);
  EXPECT_DOUBLE_EQ(rep.hvi, 1.25);
  ASSERT_EQ(rep.evicted.size(), 1u);
  EXPECT_EQ(rep.evicted[0], BlockSpec{1});
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(a.solutions()[0], BlockSpec{2});
}

TEST(Pareto, ArchiveRejectsZeroImprovement) {
  ParetoArchive a({2, 2});
  a.insert(BlockSpec{1}, {1, 1});
  const auto before = a;
  EXPECT_FALSE(a.insert(BlockSpec{3}, {1.5, 1.5}).added);
  EXPECT_FALSE(a.insert(BlockSpec{4}, {0.5, 2.5}).added);
  EXPECT_FALSE(a.insert(BlockSpec{5}, {1, 1}).added);
  EXPECT_EQ(a, before);
}

TEST(Pareto, ArchiveStaysNonDominatedAndSorted) {
  Rng rng(6);
  ParetoArchive a({1, 1});
  std::vector<Point2> all;
  for (int i = 0; i < 300; ++i) {
    const Point2 p{rng.uniform() * 1.1, rng.uniform() * 1.1};
    all.push_back(p);
    a.insert(BlockSpec{i + 1}, p);
    const auto pts = a.points();
    for (std::size_t x = 0; x < pts.size(); ++x) {
      if (x + 1 < pts.size()) EXPECT_LT(pts[x].f1, pts[x + 1].f1);
      for (std::size_t y = 0; y < pts.size(); ++y) EXPECT_FALSE(dominates(pts[x], pts[y]));
    }
  }
  EXPECT_NEAR(a.hypervolume(), hv_by_cells(all, {1, 1}), 1e-12);
}

TEST(Pareto, ReferenceFrozenAfterInsertion) {
  ParetoArchive a;
  a.set_reference({0.5, 0.5});
  a.insert(BlockSpec{1}, {0.1, 0.1});
  EXPECT_THROW(a.set_reference({1, 1}), InvalidArgument);
  EXPECT_THROW(ParetoArchive({-1, 0}), InvalidArgument);
}

TEST(Pareto, NonDominatedIndices) {
  const std::vector<Point2> pts{{3, 1}, {1, 3}, {2, 2}, {2, 2}, {3, 3}, {1, 4}};
  EXPECT_EQ(non_dominated_indices(pts), (std::vector<std::size_t>{1, 2, 0}));
}

// Reference enumeration front of the 1-D study: (D1, f1, f2).
struct Row {
  int d1;
  double f1, f2;
};
const Row kEnumerationFront[] = {
    {38, .004, .103}, {37, .009, .097}, {35, .015, .089}, {36, .017, .081}, {33, .023, .071}, {32, .038, .068},
    {30, .042, .058}, {28, .067, .051}, {24, .070, .046}, {22, .088, .041}, {18, .102, .028}, {16, .142, .026},
};

TEST(Pareto, ReferenceFrontIsMutuallyNonDominated) {
  for (const auto& a : kEnumerationFront) {
    for (const auto& b : kEnumerationFront) {
      EXPECT_FALSE(dominates({a.f1, a.f2}, {b.f1, b.f2})) << a.d1 << " vs " << b.d1;
    }
  }
  ParetoArchive arch({0.2, 0.2});
  for (const auto& a : kEnumerationFront) EXPECT_TRUE(arch.insert(BlockSpec{a.d1}, {a.f1, a.f2}).added);
  EXPECT_EQ(arch.size(), std::size(kEnumerationFront));
}

}  // namespace
}  // namespace blockopt
