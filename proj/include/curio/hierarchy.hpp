#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curio/catalog.hpp"

namespace curio::hierarchy {

inline constexpr std::array<Dimension, 4> kDefaultOrder{
    Dimension::ObjectType, Dimension::Material, Dimension::Dynasty, Dimension::OriginPlace};

/// Aggregation tree. Internal nodes: count = sum of children, children
/// ordered by (count desc, label asc). Leaves sit at depth |order| and list
/// their member ids.
struct HierarchyNode {
  std::string label;
  int depth = 0;
  long count = 0;
  std::vector<HierarchyNode> children;
  std::vector<std::string> member_ids;

  bool operator==(const HierarchyNode&) const = default;
};

/// Groups records level by level along `order`. "Unknown" values form
/// ordinary buckets. Throws EmptyOrder, DuplicateDimension.
HierarchyNode build_hierarchy(std::span<const ArtifactRecord> records,
                              std::span<const Dimension> order, std::string root_label);

inline HierarchyNode build_hierarchy(const Catalog& cat, std::span<const Dimension> order) {
  return build_hierarchy(cat.records, order, cat.portal_name);
}

struct Rect {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool operator==(const Rect&) const = default;
};

struct TreemapRect {
  std::vector<std::string> path;  // labels from the root down, root included
  Rect rect;
  int depth = 0;
  long count = 0;
};

/// Worst aspect ratio of a row of `areas` laid along a side of length `side`.
double worst_aspect(std::span<const double> areas, double side);

/// Squarified placement of `areas` (sorted descending, all > 0, summing to
/// frame.area()) inside `frame`. Rows run along the shorter side of the
/// remaining space; an area joins the current row unless that would raise
/// the row's worst aspect ratio.
std::vector<Rect> squarify(std::span<const double> areas, Rect frame);

/// Recursive squarified treemap, parents before children (pre-order).
/// Zero-count nodes get zero-area rects at the parent's free corner.
/// Throws DegenerateFrame.
std::vector<TreemapRect> treemap_layout(const HierarchyNode& root, double width, double height);

struct SunburstArc {
  std::vector<std::string> path;
  double start_angle = 0;
  double end_angle = 0;
  double inner_r = 0;
  double outer_r = 0;
  int depth = 0;
  long count = 0;
};

/// The root is the disc [0, r0] spanning the full circle; a depth-d node
/// occupies the ring [r0 + (d-1)*ring_width, r0 + d*ring_width] and an
/// angular span proportional to its count, siblings packed in child order.
/// Pre-order. Throws DegenerateRadii.
std::vector<SunburstArc> sunburst_layout(const HierarchyNode& root, double inner_radius,
                                         double ring_width);

struct PolygonSeries {
  Dimension dimension = Dimension::ObjectType;
  std::vector<std::string> axes;
  std::vector<double> values;
  std::vector<long> raw_counts;
};

/// Radar series over the top_k most frequent values of `d` (count desc,
/// label asc). "Unknown" only takes part when fewer than three other
/// values exist. Throws InvalidArgument (top_k < 3), InsufficientCategories.
PolygonSeries polygon_series(std::span<const ArtifactRecord> records, Dimension d, int top_k);

nlohmann::json treemap_json(const std::vector<TreemapRect>& rects, double width, double height);
nlohmann::json sunburst_json(const std::vector<SunburstArc>& arcs);
nlohmann::json polygon_json(const PolygonSeries& series);
nlohmann::json to_json(const HierarchyNode& node);

}  // namespace curio::hierarchy
