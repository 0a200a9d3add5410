#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "curio/hierarchy.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace curio::hierarchy {
namespace {

using curio::testing::make_record;

constexpr double kTol = 1e-9;

void expect_rects_near(const std::vector<Rect>& got, const std::vector<Rect>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].x, want[i].x, tol) << i;
    EXPECT_NEAR(got[i].y, want[i].y, tol) << i;
    EXPECT_NEAR(got[i].w, want[i].w, tol) << i;
    EXPECT_NEAR(got[i].h, want[i].h, tol) << i;
  }
}

double overlap(const Rect& a, const Rect& b) {
  double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return w > 0 && h > 0 ? w * h : 0;
}

// ---- build_hierarchy --------------------------------------------------------

TEST(BuildHierarchy, SingleLevelCounts) {
  std::vector<ArtifactRecord> recs{make_record("1", "Goa", "Sculpture", "Kadamba", "Stone"),
                                   make_record("2", "Goa", "Coin", "Kadamba", "Gold"),
                                   make_record("3", "Goa", "Sculpture", "Chalukya", "Stone"),
                                   make_record("4", "Goa", "Sculpture", "Unknown", "Bronze")};
  std::vector<Dimension> order{Dimension::ObjectType};
  auto root = build_hierarchy(recs, order, "root");
  EXPECT_EQ(root.count, 4);
  EXPECT_EQ(root.depth, 0);
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[0].label, "Sculpture");
  EXPECT_EQ(root.children[0].count, 3);
  EXPECT_EQ(root.children[1].label, "Coin");
  EXPECT_EQ(root.children[1].count, 1);
  EXPECT_EQ(root.children[0].member_ids, (std::vector<std::string>{"1", "3", "4"}));
}

TEST(BuildHierarchy, EmptyCatalogGivesEmptyRoot) {
  std::vector<Dimension> order(kDefaultOrder.begin(), kDefaultOrder.end());
  auto root = build_hierarchy(std::span<const ArtifactRecord>{}, order, "P");
  EXPECT_EQ(root.count, 0);
  EXPECT_TRUE(root.children.empty());
  auto rects = treemap_layout(root, 100, 50);
  ASSERT_EQ(rects.size(), 1u);
  EXPECT_EQ(rects[0].rect, (Rect{0, 0, 100, 50}));
}

TEST(BuildHierarchy, OrderValidation) {
  std::vector<ArtifactRecord> recs;
  EXPECT_THROW(build_hierarchy(recs, std::vector<Dimension>{}, "r"), EmptyOrder);
  EXPECT_THROW(build_hierarchy(recs, std::vector<Dimension>{Dimension::Material, Dimension::Material}, "r"),
               DuplicateDimension);
}

TEST(BuildHierarchy, StructuralInvariantsOnRandomCatalogs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto cat = curio::testing::random_catalog(rng, 60);
    std::vector<Dimension> order(kAllDimensions.begin(), kAllDimensions.end());
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(1 + rng() % 4);
    auto root = build_hierarchy(cat, order);
    EXPECT_EQ(root.count, static_cast<long>(cat.records.size()));
    std::vector<std::string> leaves;
    auto walk = [&](auto&& self, const HierarchyNode& n) -> void {
      if (n.children.empty()) {
        EXPECT_EQ(static_cast<std::size_t>(n.depth), cat.records.empty() ? 0 : order.size());
        EXPECT_EQ(static_cast<long>(n.member_ids.size()), n.count);
        leaves.insert(leaves.end(), n.member_ids.begin(), n.member_ids.end());
        return;
      }
      long sum = 0;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const auto& c = n.children[i];
        EXPECT_EQ(c.depth, n.depth + 1);
        EXPECT_GT(c.count, 0);
        sum += c.count;
        if (i > 0) {
          const auto& p = n.children[i - 1];
          EXPECT_TRUE(p.count > c.count || (p.count == c.count && p.label < c.label));
        }
        self(self, c);
      }
      EXPECT_EQ(sum, n.count);
    };
    walk(walk, root);
    std::sort(leaves.begin(), leaves.end());
    std::vector<std::string> ids;
    for (const auto& r : cat.records) ids.push_back(r.id);
    EXPECT_EQ(leaves, ids);
  }
}

TEST(BuildHierarchy, FixtureFirstLevelMatchesGroupBy) {
  auto truth = curio::testing::fixture_ground_truth();
  std::vector<harvest::RawArtifact> raws;
  std::map<std::string, long> by_type;
  for (const auto& [url, fields] : truth) {
    raws.push_back({url, fields, ""});
    ++by_type[title_case(fields.at("object_type"))];
  }
  auto cat = build_catalog(raws, "Fixture", "S").catalog;
  std::vector<Dimension> order(kDefaultOrder.begin(), kDefaultOrder.end());
  auto root = build_hierarchy(cat, order);
  EXPECT_EQ(root.count, 30);
  ASSERT_EQ(root.children.size(), by_type.size());
  for (const auto& child : root.children) EXPECT_EQ(child.count, by_type.at(child.label)) << child.label;
  EXPECT_EQ(root.children[0].label, "Sculpture");
  EXPECT_EQ(root.children[0].count, 11);
}

// ---- squarify ---------------------------------------------------------------

TEST(WorstAspect, Examples) {
  std::vector<double> one{4};
  EXPECT_DOUBLE_EQ(worst_aspect(one, 2), 1.0);
  std::vector<double> two{6, 6};
  EXPECT_DOUBLE_EQ(worst_aspect(two, 4), 1.5);  // 3x2 rectangles
}

TEST(Squarify, UnitSquareCases) {
  const Rect unit{0, 0, 1, 1};
  std::vector<double> one{1};
  expect_rects_near(squarify(one, unit), {{0, 0, 1, 1}}, kTol);
  std::vector<double> halves{0.5, 0.5};
  // tie on worst aspect: the second half joins the row
  expect_rects_near(squarify(halves, unit), {{0, 0, 1, 0.5}, {0, 0.5, 1, 0.5}}, kTol);
  std::vector<double> quarters{0.25, 0.25, 0.25, 0.25};
  expect_rects_near(squarify(quarters, unit),
                    {{0, 0, 0.5, 0.5}, {0, 0.5, 0.5, 0.5}, {0.5, 0, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}}, kTol);
}

TEST(Squarify, ClassicSevenAreasInSixByFour) {
  std::vector<double> areas{6, 6, 4, 3, 2, 2, 1};
  const Rect frame{0, 0, 6, 4};
  auto got = squarify(areas, frame);
  expect_rects_near(got, curio::testing::oracle_squarify(areas, frame), kTol);
  // the first row is the left column of two 3x2 rectangles; 4 and 3 share the next row
  expect_rects_near({got[0], got[1]}, {{0, 0, 3, 2}, {0, 2, 3, 2}}, kTol);
  EXPECT_NEAR(got[2].h, got[3].h, kTol);
  EXPECT_NEAR(got[2].h, 7.0 / 3.0, kTol);
}

TEST(Squarify, MatchesRecursiveOracleOnRandomInputs) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(0.01, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> weights(1 + rng() % 15);
    for (auto& w : weights) w = dist(rng);
    std::sort(weights.rbegin(), weights.rend());
    Rect frame{0, 0, dist(rng) * 10, dist(rng) * 10};
    double sum = 0;
    for (double w : weights) sum += w;
    for (auto& w : weights) w *= frame.area() / sum;
    expect_rects_near(squarify(weights, frame), curio::testing::oracle_squarify(weights, frame),
                      kTol * std::max(frame.w, frame.h));
  }
}

// ---- treemap ----------------------------------------------------------------

TEST(Treemap, InvariantsOnRandomHierarchies) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    auto cat = curio::testing::random_catalog(rng, 80);
    std::vector<Dimension> order(kAllDimensions.begin(), kAllDimensions.end());
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(1 + rng() % 4);
    auto root = build_hierarchy(cat, order);
    const double W = 100 + static_cast<double>(rng() % 900), H = 100 + static_cast<double>(rng() % 900);
    auto rects = treemap_layout(root, W, H);
    const double tol = kTol * W * H;

    // rects are pre-order; recover children of each parent by path prefix
    for (std::size_t p = 0; p < rects.size(); ++p) {
      const auto& parent = rects[p];
      std::vector<const TreemapRect*> kids;
      for (std::size_t c = p + 1; c < rects.size() && rects[c].path.size() > parent.path.size(); ++c) {
        if (rects[c].path.size() == parent.path.size() + 1) kids.push_back(&rects[c]);
      }
      if (kids.empty()) continue;
      double area_sum = 0;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const auto& r = kids[i]->rect;
        const double expected = parent.rect.area() * kids[i]->count / static_cast<double>(parent.count);
        EXPECT_NEAR(r.area(), expected, tol);
        EXPECT_GE(r.x, parent.rect.x - kTol * W);
        EXPECT_GE(r.y, parent.rect.y - kTol * H);
        EXPECT_LE(r.x + r.w, parent.rect.x + parent.rect.w + kTol * W);
        EXPECT_LE(r.y + r.h, parent.rect.y + parent.rect.h + kTol * H);
        area_sum += r.area();
        for (std::size_t j = 0; j < i; ++j) EXPECT_LE(overlap(r, kids[j]->rect), tol);
      }
      EXPECT_NEAR(area_sum, parent.rect.area(), tol);
    }
  }
}

TEST(Treemap, RootAndDegenerateFrame) {
  std::vector<ArtifactRecord> recs{make_record("1", "Goa", "Coin", "K", "Gold")};
  std::vector<Dimension> order{Dimension::Material};
  auto root = build_hierarchy(recs, order, "r");
  auto rects = treemap_layout(root, 10, 5);
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[0].path, std::vector<std::string>{"r"});
  EXPECT_EQ(rects[1].path, (std::vector<std::string>{"r", "Gold"}));
  EXPECT_NEAR(rects[1].rect.area(), 50, kTol);
  EXPECT_THROW(treemap_layout(root, 0, 5), DegenerateFrame);
  EXPECT_THROW(treemap_layout(root, 10, -1), DegenerateFrame);
  auto j = treemap_json(rects, 10, 5);
  EXPECT_EQ(j.at("frame").at("w"), 10);
  EXPECT_EQ(j.at("rects").size(), 2u);
}

// ---- sunburst ---------------------------------------------------------------

TEST(Sunburst, SpansProportionalToCounts) {
  std::vector<ArtifactRecord> recs{make_record("1", "g", "A", "k", "m"), make_record("2", "g", "B", "k", "m"),
                                   make_record("3", "g", "C", "k", "m"), make_record("4", "g", "C", "k", "m")};
  std::vector<Dimension> order{Dimension::ObjectType};
  auto arcs = sunburst_layout(build_hierarchy(recs, order, "r"), 40, 60);
  ASSERT_EQ(arcs.size(), 4u);
  EXPECT_NEAR(arcs[0].end_angle - arcs[0].start_angle, 2 * std::numbers::pi, kTol);
  EXPECT_EQ(arcs[0].inner_r, 0);
  EXPECT_EQ(arcs[0].outer_r, 40);
  EXPECT_EQ(arcs[1].path.back(), "C");
  EXPECT_NEAR(arcs[1].end_angle - arcs[1].start_angle, std::numbers::pi, kTol);
  EXPECT_NEAR(arcs[2].end_angle - arcs[2].start_angle, std::numbers::pi / 2, kTol);
  EXPECT_NEAR(arcs[3].end_angle - arcs[3].start_angle, std::numbers::pi / 2, kTol);
  EXPECT_EQ(arcs[1].inner_r, 40);
  EXPECT_EQ(arcs[1].outer_r, 100);
}

TEST(Sunburst, ChildrenPartitionParentSpan) {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 100; ++trial) {
    auto cat = curio::testing::random_catalog(rng, 60);
    std::vector<Dimension> order(kDefaultOrder.begin(), kDefaultOrder.end());
    auto root = build_hierarchy(cat, order);
    auto arcs = sunburst_layout(root, 30, 25);
    for (std::size_t p = 0; p < arcs.size(); ++p) {
      const auto& parent = arcs[p];
      EXPECT_LE(parent.start_angle, parent.end_angle);
      EXPECT_NEAR(parent.outer_r - parent.inner_r, parent.depth == 0 ? 30 : 25, kTol);
      double cursor = parent.start_angle;
      bool any = false;
      for (std::size_t c = p + 1; c < arcs.size() && arcs[c].path.size() > parent.path.size(); ++c) {
        if (arcs[c].path.size() != parent.path.size() + 1) continue;
        any = true;
        EXPECT_NEAR(arcs[c].start_angle, cursor, kTol);
        EXPECT_NEAR(arcs[c].inner_r, parent.outer_r, kTol);
        EXPECT_NEAR(arcs[c].end_angle - arcs[c].start_angle,
                    (parent.end_angle - parent.start_angle) * arcs[c].count / parent.count, kTol);
        cursor = arcs[c].end_angle;
      }
      if (any) EXPECT_NEAR(cursor, parent.end_angle, kTol);
    }
  }
}

TEST(Sunburst, DegenerateRadii) {
  HierarchyNode root{"r", 0, 0, {}, {}};
  EXPECT_THROW(sunburst_layout(root, -1, 10), DegenerateRadii);
  EXPECT_THROW(sunburst_layout(root, 10, 0), DegenerateRadii);
  EXPECT_NO_THROW(sunburst_layout(root, 0, 10));
}

// ---- polygon ----------------------------------------------------------------

std::vector<ArtifactRecord> materials(std::map<std::string, int> counts) {
  std::vector<ArtifactRecord> out;
  int n = 0;
  for (const auto& [value, count] : counts) {
    for (int i = 0; i < count; ++i) out.push_back(make_record(std::to_string(n++), "g", "t", "d", value));
  }
  return out;
}

TEST(Polygon, NormalizedByLargestCount) {
  auto recs = materials({{"Copper", 5}, {"Stone", 3}, {"Wood", 2}});
  auto s = polygon_series(recs, Dimension::Material, 8);
  EXPECT_EQ(s.axes, (std::vector<std::string>{"Copper", "Stone", "Wood"}));
  ASSERT_EQ(s.values.size(), 3u);
  EXPECT_NEAR(s.values[0], 1.0, kTol);
  EXPECT_NEAR(s.values[1], 0.6, kTol);
  EXPECT_NEAR(s.values[2], 0.4, kTol);
  EXPECT_EQ(s.raw_counts, (std::vector<long>{5, 3, 2}));
}

TEST(Polygon, UnknownExcludedWhenEnoughKnownValues) {
  auto recs = materials({{"Copper", 1}, {"Stone", 1}, {"Wood", 1}, {"Unknown", 9}});
  auto s = polygon_series(recs, Dimension::Material, 8);
  EXPECT_EQ(std::count(s.axes.begin(), s.axes.end(), "Unknown"), 0);
  auto few = materials({{"Copper", 2}, {"Stone", 1}, {"Unknown", 4}});
  EXPECT_EQ(polygon_series(few, Dimension::Material, 8).axes,
            (std::vector<std::string>{"Unknown", "Copper", "Stone"}));
}

TEST(Polygon, Errors) {
  auto two = materials({{"Copper", 2}, {"Stone", 1}});
  EXPECT_THROW(polygon_series(two, Dimension::Material, 8), InsufficientCategories);
  auto three = materials({{"Copper", 2}, {"Stone", 1}, {"Wood", 1}});
  EXPECT_THROW(polygon_series(three, Dimension::Material, 2), InvalidArgument);
}

TEST(Polygon, FixtureTopFiveMatchesRecount) {
  auto truth = curio::testing::fixture_ground_truth();
  std::vector<harvest::RawArtifact> raws;
  std::map<std::string, long> counts;
  for (const auto& [url, fields] : truth) {
    raws.push_back({url, fields, ""});
    ++counts[title_case(fields.at("object_type"))];
  }
  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.second > b.second; });
  ranked.resize(5);

  auto cat = build_catalog(raws, "Fixture", "S").catalog;
  auto s = polygon_series(cat.records, Dimension::ObjectType, 5);
  ASSERT_EQ(s.axes.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.axes[i], ranked[i].first);
    EXPECT_EQ(s.raw_counts[i], ranked[i].second);
    EXPECT_NEAR(s.values[i], static_cast<double>(ranked[i].second) / ranked[0].second, kTol);
  }
  auto j = polygon_json(s);
  EXPECT_EQ(j.at("dimension"), "object_type");
}

}  // namespace
}  // namespace curio::hierarchy
