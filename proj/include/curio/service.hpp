#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curio/catalog.hpp"
#include "curio/graph.hpp"

namespace curio::service {

enum class VizKind { Network, Treemap, Sunburst, Polygon };

std::string_view viz_name(VizKind kind);

using Query = std::multimap<std::string, std::string>;
using FilterPair = std::pair<Dimension, std::string>;

/// Defaults: dims = all four, mode = hub, top_k = 8, polygon dimension =
/// object_type, order = object_type, material, dynasty, origin_place;
/// network frame 1000x1000, 200 iterations, seed 42; treemap frame
/// 1000x600; sunburst r0 = 40, ring_width = 60.
struct VizRequest {
  VizKind viz = VizKind::Network;
  std::vector<Dimension> order;
  std::vector<Dimension> dims;
  graph::Mode mode = graph::Mode::Hub;
  int top_k = 8;
  std::vector<FilterPair> filter;
  double width = 0;
  double height = 0;
  int iterations = 200;
  std::uint64_t seed = 42;
  double r0 = 40;
  double ring_width = 60;

  static VizRequest defaults(VizKind viz);
};

/// Query keys: order, dims (comma lists of dimension names), mode,
/// top_k, filter (repeatable "dimension:value"), width, height,
/// iterations, seed, r0, ring_width. Anything else is rejected.
///
/// Throws BadParameter, BadDimension, DuplicateDimension.
VizRequest parse_viz_request(VizKind viz, const Query& query);

/// Records matching every (dimension, value) pair exactly, in input order.
std::vector<ArtifactRecord> apply_filter(std::span<const ArtifactRecord> records,
                                         std::span<const FilterPair> pairs);

/// Parses "dimension:value" pairs. Throws BadDimension, BadParameter.
std::vector<FilterPair> parse_filters(std::span<const std::string> terms);

struct Response {
  int status = 200;
  std::string body;
};

/// Request handling over an immutable catalog. Bodies are compact JSON and
/// depend only on (catalog, request), so repeated calls are byte-identical.
class VizService {
 public:
  explicit VizService(Catalog catalog);

  const Catalog& catalog() const { return catalog_; }

  Response health() const;
  Response meta() const;
  Response full_catalog() const;
  Response artifact(const std::string& id) const;
  Response viz(VizKind kind, const Query& query) const;
  Response viz(const VizRequest& request) const;

 private:
  Catalog catalog_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";  // empty disables the header
};

/// HTTP front end. GET /api/health, /api/catalog, /api/catalog/meta,
/// /api/artifacts/{id}, /api/viz/{network,treemap,sunburst,polygon}, and
/// static files under /.
class Server {
 public:
  Server(std::shared_ptr<const VizService> service, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; throws BindError. Returns the bound port.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" -> (host, port). Throws BadParameter.
std::pair<std::string, int> parse_bind_address(const std::string& address);

/// Writes catalog.json, network.json, treemap.json, sunburst.json and
/// polygon.json, each identical to the live response with default params.
/// Throws IoError.
void export_bundle(const VizService& service, const std::filesystem::path& out_dir);
void export_bundle(const std::filesystem::path& catalog_path, const std::filesystem::path& out_dir);

}  // namespace curio::service
