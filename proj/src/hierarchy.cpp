#include "curio/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "curio/errors.hpp"

namespace curio::hierarchy {

namespace {

void sort_children(std::vector<HierarchyNode>& children) {
  std::sort(children.begin(), children.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.label < b.label;
  });
}

HierarchyNode group(std::vector<const ArtifactRecord*> members, std::span<const Dimension> order,
                    std::string label, int depth) {
  HierarchyNode node;
  node.label = std::move(label);
  node.depth = depth;
  node.count = static_cast<long>(members.size());
  if (static_cast<std::size_t>(depth) == order.size()) {
    for (const auto* rec : members) node.member_ids.push_back(rec->id);
    std::sort(node.member_ids.begin(), node.member_ids.end());
    return node;
  }
  std::map<std::string, std::vector<const ArtifactRecord*>> buckets;
  for (const auto* rec : members) buckets[rec->dim(order[depth])].push_back(rec);
  for (auto& [value, bucket] : buckets) {
    node.children.push_back(group(std::move(bucket), order, value, depth + 1));
  }
  sort_children(node.children);
  return node;
}

void emit_treemap(const HierarchyNode& node, Rect rect, std::vector<std::string>& path,
                  std::vector<TreemapRect>& out) {
  path.push_back(node.label);
  out.push_back({path, rect, node.depth, node.count});
  if (!node.children.empty()) {
    std::vector<double> areas;
    const double total = rect.area();
    for (const auto& child : node.children) {
      if (child.count > 0 && node.count > 0) {
        areas.push_back(total * static_cast<double>(child.count) / static_cast<double>(node.count));
      }
    }
    std::vector<Rect> placed;
    if (!areas.empty() && total > 0) placed = squarify(areas, rect);
    std::size_t next = 0;
    const Rect corner{rect.x + rect.w, rect.y + rect.h, 0, 0};
    for (const auto& child : node.children) {
      bool sized = child.count > 0 && next < placed.size();
      emit_treemap(child, sized ? placed[next++] : corner, path, out);
    }
  }
  path.pop_back();
}

void emit_sunburst(const HierarchyNode& node, double start, double end, double r0, double ring,
                   std::vector<std::string>& path, std::vector<SunburstArc>& out) {
  path.push_back(node.label);
  double inner = node.depth == 0 ? 0.0 : r0 + (node.depth - 1) * ring;
  double outer = node.depth == 0 ? r0 : r0 + node.depth * ring;
  out.push_back({path, start, end, inner, outer, node.depth, node.count});
  const double span = end - start;
  long cumulative = 0;
  for (const auto& child : node.children) {
    double child_start = start;
    double child_end = start;
    if (node.count > 0) {
      child_start = start + span * static_cast<double>(cumulative) / static_cast<double>(node.count);
      cumulative += child.count;
      child_end = start + span * static_cast<double>(cumulative) / static_cast<double>(node.count);
    }
    emit_sunburst(child, child_start, child_end, r0, ring, path, out);
  }
  path.pop_back();
}

nlohmann::json path_json(const std::vector<std::string>& path) { return path; }

}  // namespace

HierarchyNode build_hierarchy(std::span<const ArtifactRecord> records,
                              std::span<const Dimension> order, std::string root_label) {
  if (order.empty()) throw EmptyOrder("hierarchy order must name at least one dimension");
  std::set<Dimension> seen;
  for (auto d : order) {
    if (!seen.insert(d).second) {
      throw DuplicateDimension("dimension " + std::string(dimension_name(d)) +
                               " repeated in hierarchy order");
    }
  }
  std::vector<const ArtifactRecord*> members;
  members.reserve(records.size());
  for (const auto& rec : records) members.push_back(&rec);
  return group(std::move(members), order, std::move(root_label), 0);
}

double worst_aspect(std::span<const double> areas, double side) {
  if (areas.empty()) return std::numeric_limits<double>::infinity();
  double sum = 0;
  double largest = areas.front();
  double smallest = areas.front();
  for (double a : areas) {
    sum += a;
    largest = std::max(largest, a);
    smallest = std::min(smallest, a);
  }
  const double side2 = side * side;
  const double sum2 = sum * sum;
  return std::max(side2 * largest / sum2, sum2 / (side2 * smallest));
}

std::vector<Rect> squarify(std::span<const double> areas, Rect frame) {
  std::vector<Rect> out;
  out.reserve(areas.size());
  Rect free = frame;
  std::size_t i = 0;
  while (i < areas.size()) {
    const double side = std::min(free.w, free.h);
    std::size_t j = i + 1;
    while (j < areas.size() &&
           worst_aspect(areas.subspan(i, j - i + 1), side) <= worst_aspect(areas.subspan(i, j - i), side)) {
      ++j;
    }
    double sum = 0;
    for (std::size_t r = i; r < j; ++r) sum += areas[r];
    const bool column = free.w >= free.h;  // row runs along the (shorter) height
    const bool final_row = j == areas.size();
    double thickness = sum / side;
    if (final_row) thickness = column ? free.w : free.h;

    double offset = column ? free.y : free.x;
    const double limit = offset + side;
    for (std::size_t r = i; r < j; ++r) {
      double length = areas[r] / thickness;
      if (r + 1 == j) length = limit - offset;
      if (column) {
        out.push_back({free.x, offset, thickness, length});
      } else {
        out.push_back({offset, free.y, length, thickness});
      }
      offset += length;
    }
    if (column) {
      free.x += thickness;
      free.w = std::max(0.0, free.w - thickness);
    } else {
      free.y += thickness;
      free.h = std::max(0.0, free.h - thickness);
    }
    i = j;
  }
  return out;
}

std::vector<TreemapRect> treemap_layout(const HierarchyNode& root, double width, double height) {
  if (!(width > 0) || !(height > 0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw DegenerateFrame("treemap frame must have positive finite width and height");
  }
  std::vector<TreemapRect> out;
  std::vector<std::string> path;
  emit_treemap(root, Rect{0, 0, width, height}, path, out);
  return out;
}

std::vector<SunburstArc> sunburst_layout(const HierarchyNode& root, double inner_radius,
                                         double ring_width) {
  if (!(inner_radius >= 0) || !(ring_width > 0) || !std::isfinite(inner_radius) ||
      !std::isfinite(ring_width)) {
    throw DegenerateRadii("sunburst needs inner radius >= 0 and ring width > 0");
  }
  std::vector<SunburstArc> out;
  std::vector<std::string> path;
  emit_sunburst(root, 0.0, 2.0 * std::numbers::pi, inner_radius, ring_width, path, out);
  return out;
}

PolygonSeries polygon_series(std::span<const ArtifactRecord> records, Dimension d, int top_k) {
  if (top_k < 3) throw InvalidArgument("top_k must be at least 3");
  std::map<std::string, long> counts;
  for (const auto& rec : records) ++counts[rec.dim(d)];

  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  auto known = std::count_if(ranked.begin(), ranked.end(),
                             [](const auto& entry) { return entry.first != kUnknown; });
  if (known >= 3) {
    std::erase_if(ranked, [](const auto& entry) { return entry.first == kUnknown; });
  }
  if (ranked.size() < 3) {
    throw InsufficientCategories(std::string(dimension_name(d)) + " has only " +
                                 std::to_string(ranked.size()) +
                                 " distinct values; a polygon needs 3");
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(top_k)) ranked.resize(static_cast<std::size_t>(top_k));

  PolygonSeries series;
  series.dimension = d;
  const double max_count = static_cast<double>(ranked.front().second);
  for (const auto& [label, count] : ranked) {
    series.axes.push_back(label);
    series.raw_counts.push_back(count);
    series.values.push_back(static_cast<double>(count) / max_count);
  }
  return series;
}

nlohmann::json treemap_json(const std::vector<TreemapRect>& rects, double width, double height) {
  auto items = nlohmann::json::array();
  for (const auto& r : rects) {
    items.push_back({{"path", path_json(r.path)},
                     {"x", r.rect.x},
                     {"y", r.rect.y},
                     {"w", r.rect.w},
                     {"h", r.rect.h},
                     {"depth", r.depth},
                     {"count", r.count}});
  }
  return {{"frame", {{"w", width}, {"h", height}}}, {"rects", std::move(items)}};
}

nlohmann::json sunburst_json(const std::vector<SunburstArc>& arcs) {
  auto items = nlohmann::json::array();
  for (const auto& a : arcs) {
    items.push_back({{"path", path_json(a.path)},
                     {"start", a.start_angle},
                     {"end", a.end_angle},
                     {"inner_r", a.inner_r},
                     {"outer_r", a.outer_r},
                     {"depth", a.depth},
                     {"count", a.count}});
  }
  return {{"arcs", std::move(items)}};
}

nlohmann::json polygon_json(const PolygonSeries& series) {
  return {{"dimension", dimension_name(series.dimension)},
          {"axes", series.axes},
          {"values", series.values},
          {"raw_counts", series.raw_counts}};
}

nlohmann::json to_json(const HierarchyNode& node) {
  nlohmann::json j = {{"label", node.label}, {"depth", node.depth}, {"count", node.count}};
  auto children = nlohmann::json::array();
  for (const auto& child : node.children) children.push_back(to_json(child));
  j["children"] = std::move(children);
  if (node.children.empty()) j["member_ids"] = node.member_ids;
  return j;
}

}  // namespace curio::hierarchy
