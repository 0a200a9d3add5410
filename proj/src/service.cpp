#include "curio/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <set>

#include "curio/errors.hpp"
#include "curio/hierarchy.hpp"
#include "curio/io.hpp"

namespace curio::service {

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";
constexpr int kMaxIterations = 5000;
constexpr double kMaxExtent = 1e6;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"order", "dims",       "mode",  "top_k",
                                          "filter", "width",     "height", "iterations",
                                          "seed",   "r0",        "ring_width"};
  return keys;
}

Response json_response(int status, const nlohmann::json& body) {
  return {status, io::compact(body)};
}

Response error_response(int status, const std::string& kind, const std::string& detail) {
  return json_response(status, {{"error", kind}, {"detail", detail}});
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = text.find(',', start);
    out.push_back(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<Dimension> parse_dimension_list(const std::string& key, const std::string& text) {
  std::vector<Dimension> out;
  if (text.empty()) throw BadParameter(key + " must name at least one dimension");
  for (const auto& name : split_list(text)) {
    auto d = parse_dimension(name);
    if (std::find(out.begin(), out.end(), d) != out.end()) {
      throw DuplicateDimension(key + " repeats dimension '" + name + "'");
    }
    out.push_back(d);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw BadParameter(key + " is not a valid number: '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw BadParameter(key + " must be finite");
  }
  return value;
}

double parse_extent(const std::string& key, const std::string& text) {
  double v = parse_number<double>(key, text);
  if (!(v > 0) || v > kMaxExtent) {
    throw BadParameter(key + " must be in (0, " + std::to_string(static_cast<long>(kMaxExtent)) + "]");
  }
  return v;
}

}  // namespace

std::string_view viz_name(VizKind kind) {
  switch (kind) {
    case VizKind::Network: return "network";
    case VizKind::Treemap: return "treemap";
    case VizKind::Sunburst: return "sunburst";
    case VizKind::Polygon: return "polygon";
  }
  return "";
}

VizRequest VizRequest::defaults(VizKind viz) {
  VizRequest r;
  r.viz = viz;
  r.order.assign(hierarchy::kDefaultOrder.begin(), hierarchy::kDefaultOrder.end());
  if (viz == VizKind::Polygon) {
    r.dims = {Dimension::ObjectType};
  } else {
    r.dims.assign(kAllDimensions.begin(), kAllDimensions.end());
  }
  r.width = 1000;
  r.height = viz == VizKind::Treemap ? 600 : 1000;
  return r;
}

std::vector<FilterPair> parse_filters(std::span<const std::string> terms) {
  std::vector<FilterPair> out;
  for (const auto& term : terms) {
    auto colon = term.find(':');
    if (colon == std::string::npos) {
      throw BadParameter("filter must look like dimension:value, got '" + term + "'");
    }
    auto d = parse_dimension(term.substr(0, colon));
    auto value = term.substr(colon + 1);
    if (value.empty()) throw BadParameter("filter value for " + term.substr(0, colon) + " is empty");
    out.emplace_back(d, std::move(value));
  }
  return out;
}

VizRequest parse_viz_request(VizKind viz, const Query& query) {
  VizRequest r = VizRequest::defaults(viz);
  std::vector<std::string> filters;
  for (const auto& [key, value] : query) {
    if (!known_keys().contains(key)) throw BadParameter("unknown query parameter '" + key + "'");
    if (key != "filter" && query.count(key) > 1) {
      throw BadParameter("query parameter '" + key + "' given more than once");
    }
    if (key == "order") {
      r.order = parse_dimension_list(key, value);
    } else if (key == "dims") {
      r.dims = parse_dimension_list(key, value);
    } else if (key == "mode") {
      auto mode = graph::mode_from_name(value);
      if (!mode) throw BadParameter("mode must be hub or pairwise, got '" + value + "'");
      r.mode = *mode;
    } else if (key == "top_k") {
      r.top_k = parse_number<int>(key, value);
      if (r.top_k < 3 || r.top_k > 1000) throw BadParameter("top_k must be in [3, 1000]");
    } else if (key == "filter") {
      filters.push_back(value);
    } else if (key == "width") {
      r.width = parse_extent(key, value);
    } else if (key == "height") {
      r.height = parse_extent(key, value);
    } else if (key == "iterations") {
      r.iterations = parse_number<int>(key, value);
      if (r.iterations < 1 || r.iterations > kMaxIterations) {
        throw BadParameter("iterations must be in [1, " + std::to_string(kMaxIterations) + "]");
      }
    } else if (key == "seed") {
      r.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "r0") {
      r.r0 = parse_number<double>(key, value);
      if (r.r0 < 0 || r.r0 > kMaxExtent) throw BadParameter("r0 must be in [0, 1000000]");
    } else if (key == "ring_width") {
      r.ring_width = parse_extent(key, value);
    }
  }
  r.filter = parse_filters(filters);
  if (viz == VizKind::Polygon && r.dims.size() != 1) {
    throw BadParameter("polygon takes exactly one dimension in dims");
  }
  return r;
}

std::vector<ArtifactRecord> apply_filter(std::span<const ArtifactRecord> records,
                                         std::span<const FilterPair> pairs) {
  std::vector<ArtifactRecord> out;
  for (const auto& rec : records) {
    bool keep = std::all_of(pairs.begin(), pairs.end(),
                            [&](const FilterPair& p) { return rec.dim(p.first) == p.second; });
    if (keep) out.push_back(rec);
  }
  return out;
}

VizService::VizService(Catalog catalog) : catalog_(std::move(catalog)) {}

Response VizService::health() const {
  return json_response(200, {{"status", "ok"}, {"records", catalog_.records.size()}});
}

Response VizService::meta() const {
  nlohmann::json dims = nlohmann::json::object();
  for (auto d : kAllDimensions) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [value, ids] : dimension_index(catalog_, d)) values[value] = ids.size();
    dims[std::string(dimension_name(d))] = std::move(values);
  }
  return json_response(200, {{"portal_name", catalog_.portal_name},
                             {"built_at", catalog_.built_at},
                             {"records", catalog_.records.size()},
                             {"dimensions", std::move(dims)}});
}

Response VizService::full_catalog() const { return json_response(200, to_json(catalog_)); }

Response VizService::artifact(const std::string& id) const {
  if (const auto* rec = catalog_.find(id)) return json_response(200, to_json(*rec));
  return error_response(404, "NotFound", "no artifact with id '" + id + "'");
}

Response VizService::viz(VizKind kind, const Query& query) const {
  try {
    return viz(parse_viz_request(kind, query));
  } catch (const Error& e) {
    return error_response(400, e.kind(), e.what());
  }
}

Response VizService::viz(const VizRequest& request) const {
  try {
    auto records = apply_filter(catalog_.records, request.filter);
    switch (request.viz) {
      case VizKind::Network: {
        auto g = graph::build_network(records, request.dims, request.mode);
        auto layout = graph::force_layout(
            g, {request.width, request.height, request.iterations, request.seed});
        return json_response(200, graph::to_json(g, layout));
      }
      case VizKind::Treemap: {
        auto root = hierarchy::build_hierarchy(records, request.order, catalog_.portal_name);
        auto rects = hierarchy::treemap_layout(root, request.width, request.height);
        return json_response(200, hierarchy::treemap_json(rects, request.width, request.height));
      }
      case VizKind::Sunburst: {
        auto root = hierarchy::build_hierarchy(records, request.order, catalog_.portal_name);
        auto arcs = hierarchy::sunburst_layout(root, request.r0, request.ring_width);
        return json_response(200, hierarchy::sunburst_json(arcs));
      }
      case VizKind::Polygon: {
        hierarchy::PolygonSeries series;
        series.dimension = request.dims.front();
        try {
          series = hierarchy::polygon_series(records, request.dims.front(), request.top_k);
        } catch (const InsufficientCategories&) {
          // too few categories to draw: empty series
        }
        return json_response(200, hierarchy::polygon_json(series));
      }
    }
  } catch (const Error& e) {
    return error_response(400, e.kind(), e.what());
  }
  return error_response(400, "BadParameter", "unknown visualization");
}

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw BadParameter("bind address must look like host:port, got '" + address + "'");
  }
  int port = parse_number<int>("port", address.substr(colon + 1));
  if (port < 0 || port > 65535) throw BadParameter("port out of range: " + std::to_string(port));
  std::string host = address.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, port};
}

struct Server::Impl {
  std::shared_ptr<const VizService> service;
  ServerOptions options;
  httplib::Server http;
  bool bound = false;

  void send(httplib::Response& res, const Response& out) {
    res.status = out.status;
    res.set_content(out.body, kJson);
  }

  void install_routes() {
    if (!options.cors_origin.empty()) {
      http.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin}});
    }
    http.Get("/api/health", [this](const auto&, auto& res) { send(res, service->health()); });
    http.Get("/api/catalog", [this](const auto&, auto& res) { send(res, service->full_catalog()); });
    http.Get("/api/catalog/meta", [this](const auto&, auto& res) { send(res, service->meta()); });
    http.Get(R"(/api/artifacts/(.+))", [this](const httplib::Request& req, auto& res) {
      send(res, service->artifact(req.matches[1]));
    });
    for (auto kind : {VizKind::Network, VizKind::Treemap, VizKind::Sunburst, VizKind::Polygon}) {
      http.Get("/api/viz/" + std::string(viz_name(kind)),
               [this, kind](const httplib::Request& req, auto& res) {
                 Query query(req.params.begin(), req.params.end());
                 send(res, service->viz(kind, query));
               });
    }
    if (options.static_dir) {
      if (!http.set_mount_point("/", options.static_dir->string())) {
        throw BindError("static directory not found: " + options.static_dir->string());
      }
    }
    http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      auto kind = res.status == 404 ? "NotFound" : "HttpError";
      res.set_content(io::compact({{"error", kind}, {"detail", req.method + " " + req.path}}), kJson);
      return httplib::Server::HandlerResponse::Handled;
    });
    http.set_exception_handler([](const auto&, httplib::Response& res, std::exception_ptr ep) {
      std::string detail = "unexpected error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        detail = e.what();
      } catch (...) {
      }
      res.status = 500;
      res.set_content(io::compact({{"error", "InternalError"}, {"detail", detail}}), kJson);
    });
  }
};

Server::Server(std::shared_ptr<const VizService> service, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->options = std::move(options);
  impl_->install_routes();
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& o = impl_->options;
  int port = o.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(o.host);
    if (port < 0) throw BindError("cannot bind " + o.host);
  } else if (!impl_->http.bind_to_port(o.host, port)) {
    throw BindError("cannot bind " + o.host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return port;
}

void Server::listen() {
  if (!impl_->bound) bind();
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_) impl_->http.stop();
}

void export_bundle(const VizService& service, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  io::write_file(out_dir / "catalog.json", service.full_catalog().body);
  for (auto kind : {VizKind::Network, VizKind::Treemap, VizKind::Sunburst, VizKind::Polygon}) {
    auto response = service.viz(VizRequest::defaults(kind));
    if (response.status != 200) {
      throw Error("ExportError", std::string(viz_name(kind)) + ": " + response.body);
    }
    io::write_file(out_dir / (std::string(viz_name(kind)) + ".json"), response.body);
  }
}

void export_bundle(const std::filesystem::path& catalog_path, const std::filesystem::path& out_dir) {
  export_bundle(VizService(load_catalog(catalog_path)), out_dir);
}

}  // namespace curio::service
