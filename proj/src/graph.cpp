#include "curio/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

#include "curio/errors.hpp"

namespace curio::graph {

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view mode_name(Mode m) { return m == Mode::Hub ? "hub" : "pairwise"; }

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "hub") return Mode::Hub;
  if (name == "pairwise") return Mode::Pairwise;
  return std::nullopt;
}

std::string hub_id(Dimension d, std::string_view value) {
  return std::string(dimension_name(d)) + "=" + std::string(value);
}

NetworkGraph build_network(std::span<const ArtifactRecord> records,
                           std::span<const Dimension> dims, Mode mode) {
  if (dims.empty()) throw EmptyDims("network needs at least one dimension");
  std::set<Dimension> chosen(dims.begin(), dims.end());

  NetworkGraph g;
  g.mode = mode;
  g.nodes.reserve(records.size());
  for (const auto& rec : records) {
    g.nodes.push_back({rec.id, NodeKind::Artifact, rec.title, std::nullopt, 1});
  }

  if (mode == Mode::Hub) {
    // (dimension, value) -> hub node index, ordered for stable numbering
    std::map<std::pair<Dimension, std::string>, std::size_t> hubs;
    for (const auto& rec : records) {
      for (auto d : chosen) {
        if (rec.dim(d) != kUnknown) hubs.emplace(std::pair{d, rec.dim(d)}, 0);
      }
    }
    std::unordered_set<std::string> artifact_ids;
    for (const auto& rec : records) artifact_ids.insert(rec.id);
    for (auto& [key, index] : hubs) {
      auto id = hub_id(key.first, key.second);
      if (artifact_ids.contains(id)) {
        throw InvalidArgument("artifact id collides with hub node id " + id);
      }
      index = g.nodes.size();
      g.nodes.push_back({std::move(id), NodeKind::DimensionValue, key.second, key.first, 0});
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (auto d : chosen) {
        const auto& value = records[i].dim(d);
        if (value == kUnknown) continue;
        auto hub = hubs.at({d, value});
        g.edges.push_back({i, hub, d});
        ++g.nodes[hub].weight;
      }
    }
    return g;
  }

  // Pairwise: each (dimension, value) bucket becomes a clique.
  for (auto d : chosen) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].dim(d) != kUnknown) buckets[records[i].dim(d)].push_back(i);
    }
    for (const auto& [_, members] : buckets) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          g.edges.push_back({members[a], members[b], d});
        }
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::vector<Point> initial_positions(std::size_t count, double width, double height,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out(count);
  for (auto& p : out) {
    p.x = unit_draw(rng) * width;
    p.y = unit_draw(rng) * height;
  }
  return out;
}

Layout force_layout(const NetworkGraph& g, const LayoutParams& params) {
  if (!(params.width > 0) || !(params.height > 0) || !std::isfinite(params.width) ||
      !std::isfinite(params.height)) {
    throw DegenerateFrame("layout frame must have positive finite width and height");
  }
  if (params.iterations < 1) throw InvalidArgument("iterations must be >= 1");

  const std::size_t n = g.nodes.size();
  Layout layout;
  layout.params = params;
  if (n == 0) return layout;

  const double W = params.width;
  const double H = params.height;
  const double k = std::sqrt(W * H / static_cast<double>(n));
  const double k2 = k * k;
  const double eps = 1e-6 * k;
  const double t0 = W / 10.0;

  // Continues the stream used for the initial positions.
  std::mt19937_64 rng(params.seed);
  rng.discard(2 * n);
  auto pos = initial_positions(n, W, H, params.seed);
  std::vector<Point> disp(n);

  auto separation_direction = [&]() {
    for (;;) {
      double dx = 2.0 * unit_draw(rng) - 1.0;
      double dy = 2.0 * unit_draw(rng) - 1.0;
      double len = std::sqrt(dx * dx + dy * dy);
      if (len > 1e-12 && len <= 1.0) return Point{dx / len, dy / len};
    }
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    const double temperature = t0 * (1.0 - static_cast<double>(iter) / params.iterations);
    std::fill(disp.begin(), disp.end(), Point{});

    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        double dx = pos[u].x - pos[v].x;
        double dy = pos[u].y - pos[v].y;
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < eps) {
          auto dir = separation_direction();
          dx = dir.x * eps;
          dy = dir.y * eps;
          dist = eps;
        }
        const double scale = k2 / (dist * dist);  // (k^2/d) * (1/d) for the unit vector
        disp[u].x += dx * scale;
        disp[u].y += dy * scale;
        disp[v].x -= dx * scale;
        disp[v].y -= dy * scale;
      }
    }

    for (const auto& e : g.edges) {
      if (e.src == e.dst) continue;
      const double dx = pos[e.src].x - pos[e.dst].x;
      const double dy = pos[e.src].y - pos[e.dst].y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist < eps) continue;
      const double scale = dist / k;  // (d^2/k) * (1/d)
      disp[e.src].x -= dx * scale;
      disp[e.src].y -= dy * scale;
      disp[e.dst].x += dx * scale;
      disp[e.dst].y += dy * scale;
    }

    for (std::size_t v = 0; v < n; ++v) {
      const double len = std::sqrt(disp[v].x * disp[v].x + disp[v].y * disp[v].y);
      if (len > 0 && std::isfinite(len)) {
        const double step = std::min(len, temperature) / len;
        pos[v].x += disp[v].x * step;
        pos[v].y += disp[v].y * step;
      }
      pos[v].x = std::clamp(pos[v].x, 0.0, W);
      pos[v].y = std::clamp(pos[v].y, 0.0, H);
    }
  }
  layout.positions = std::move(pos);
  return layout;
}

GraphStats graph_stats(const NetworkGraph& g) {
  GraphStats stats;
  stats.node_count = g.nodes.size();
  stats.edge_count = g.edges.size();
  std::vector<std::size_t> degree(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    ++stats.edges_by_type[e.edge_type];
    ++degree[e.src];
    ++degree[e.dst];
  }
  for (auto d : degree) ++stats.degree_histogram[d];
  return stats;
}

nlohmann::json to_json(const NetworkGraph& g, const Layout& layout) {
  auto nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& node = g.nodes[i];
    nlohmann::json j = {
        {"id", node.id},
        {"kind", node.kind == NodeKind::Artifact ? "artifact" : "dimension_value"},
        {"label", node.label},
        {"weight", node.weight}};
    if (node.dimension) j["dimension"] = dimension_name(*node.dimension);
    Point p = i < layout.positions.size() ? layout.positions[i] : Point{};
    j["x"] = p.x;
    j["y"] = p.y;
    nodes.push_back(std::move(j));
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"src", g.nodes[e.src].id},
                     {"dst", g.nodes[e.dst].id},
                     {"edge_type", dimension_name(e.edge_type)}});
  }
  return {{"mode", mode_name(g.mode)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"params",
           {{"width", layout.params.width},
            {"height", layout.params.height},
            {"iterations", layout.params.iterations},
            {"seed", layout.params.seed},
            {"prng", kLayoutPrng}}}};
}

}  // namespace curio::graph
