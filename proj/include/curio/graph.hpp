#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curio/catalog.hpp"

namespace curio::graph {

enum class NodeKind { Artifact, DimensionValue };
enum class Mode { Hub, Pairwise };

std::string_view mode_name(Mode m);  // "hub" | "pairwise"
std::optional<Mode> mode_from_name(std::string_view name);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Artifact;
  std::string label;
  std::optional<Dimension> dimension;  // DimensionValue nodes only
  long weight = 1;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::size_t src = 0;  // indices into NetworkGraph::nodes
  std::size_t dst = 0;
  Dimension edge_type = Dimension::OriginPlace;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

struct NetworkGraph {
  Mode mode = Mode::Hub;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

/// Id of the hub node for (d, value): "<dimension>=<value>", e.g. "material=Copper".
std::string hub_id(Dimension d, std::string_view value);

/// Hub: artifact nodes in record order, then one hub per (dimension, value)
/// in dimension order and value order; one edge per record and dimension
/// whose value is known. Pairwise: artifact nodes only; an edge (a, b, d)
/// for every a before b sharing a known value of d.
///
/// "Unknown" never produces a hub or an edge. Throws EmptyDims, and
/// InvalidArgument if a record id collides with a hub id.
NetworkGraph build_network(std::span<const ArtifactRecord> records,
                           std::span<const Dimension> dims, Mode mode);

struct Point {
  double x = 0;
  double y = 0;

  bool operator==(const Point&) const = default;
};

inline constexpr const char* kLayoutPrng = "mt19937_64";

struct LayoutParams {
  double width = 1000;
  double height = 1000;
  int iterations = 200;
  std::uint64_t seed = 42;
};

struct Layout {
  std::vector<Point> positions;  // parallel to NetworkGraph::nodes
  LayoutParams params;
};

/// Seeded starting positions: node i takes the (2i)th and (2i+1)th draws of
/// mt19937_64 mapped to [0,1) by their top 53 bits, scaled to the frame.
std::vector<Point> initial_positions(std::size_t count, double width, double height,
                                     std::uint64_t seed);

/// Fruchterman-Reingold layout.
///
/// With k = sqrt(W*H/n): all-pairs repulsion k^2/d, attraction d^2/k along
/// each edge, per-node displacement capped by a temperature cooled linearly
/// from W/10 towards 0, positions clamped to [0,W]x[0,H] after every
/// iteration. Coincident nodes are pushed apart at distance 1e-6*k along a
/// direction drawn from the same generator. Deterministic for a given
/// (graph, params): node and edge loops run in index order.
///
/// Throws DegenerateFrame, InvalidArgument (iterations < 1).
Layout force_layout(const NetworkGraph& g, const LayoutParams& params);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::map<Dimension, std::size_t> edges_by_type;
  std::map<std::size_t, std::size_t> degree_histogram;  // degree -> node count

  bool operator==(const GraphStats&) const = default;
};

GraphStats graph_stats(const NetworkGraph& g);

/// {mode, nodes:[{id,kind,label,dimension?,weight,x,y}], edges:[{src,dst,edge_type}],
///  params:{width,height,iterations,seed,prng}}
nlohmann::json to_json(const NetworkGraph& g, const Layout& layout);

}  // namespace curio::graph
