#include <gtest/gtest.h>
#include <httplib.h>

#include <chrono>
#include <thread>

#include "curio/hierarchy.hpp"
#include "curio/service.hpp"
#include "test_support.hpp"

namespace curio::service {
namespace {

using curio::testing::TempDir;
using nlohmann::json;

Catalog fixture_catalog() {
  std::vector<harvest::RawArtifact> raws;
  for (const auto& [url, fields] : curio::testing::fixture_ground_truth()) raws.push_back({url, fields, ""});
  return build_catalog(raws, "Fixture Portal", "2026-01-01T00:00:00Z").catalog;
}

json body(const Response& r) { return json::parse(r.body); }

// ---- request parsing --------------------------------------------------------

TEST(ParseVizRequest, Defaults) {
  auto net = parse_viz_request(VizKind::Network, {});
  EXPECT_EQ(net.dims.size(), 4u);
  EXPECT_EQ(net.mode, graph::Mode::Hub);
  EXPECT_EQ(net.width, 1000);
  EXPECT_EQ(net.height, 1000);
  EXPECT_EQ(net.iterations, 200);
  EXPECT_EQ(net.seed, 42u);
  auto tree = parse_viz_request(VizKind::Treemap, {});
  EXPECT_EQ(tree.order, (std::vector<Dimension>(hierarchy::kDefaultOrder.begin(), hierarchy::kDefaultOrder.end())));
  EXPECT_EQ(tree.height, 600);
  auto poly = parse_viz_request(VizKind::Polygon, {});
  EXPECT_EQ(poly.dims, std::vector<Dimension>{Dimension::ObjectType});
  EXPECT_EQ(poly.top_k, 8);
}

TEST(ParseVizRequest, ExplicitValues) {
  auto r = parse_viz_request(VizKind::Network, {{"dims", "material,dynasty"},
                                                {"mode", "pairwise"},
                                                {"seed", "7"},
                                                {"iterations", "10"},
                                                {"width", "640.5"},
                                                {"filter", "origin_place:Goa"},
                                                {"filter", "material:Stone"}});
  EXPECT_EQ(r.dims, (std::vector<Dimension>{Dimension::Material, Dimension::Dynasty}));
  EXPECT_EQ(r.mode, graph::Mode::Pairwise);
  EXPECT_EQ(r.seed, 7u);
  EXPECT_EQ(r.iterations, 10);
  EXPECT_EQ(r.width, 640.5);
  EXPECT_EQ(r.filter.size(), 2u);
}

TEST(ParseVizRequest, Rejections) {
  EXPECT_THROW(parse_viz_request(VizKind::Treemap, {{"order", "color"}}), BadDimension);
  EXPECT_THROW(parse_viz_request(VizKind::Treemap, {{"order", "material,material"}}), DuplicateDimension);
  EXPECT_THROW(parse_viz_request(VizKind::Treemap, {{"order", ""}}), Error);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"colour", "x"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"seed", "1"}, {"seed", "2"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"mode", "star"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"iterations", "ten"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"iterations", "0"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"width", "1e9"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Polygon, {{"top_k", "2"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Polygon, {{"dims", "material,dynasty"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"filter", "material"}}), BadParameter);
  EXPECT_THROW(parse_viz_request(VizKind::Network, {{"filter", "color:Red"}}), BadDimension);
}

TEST(ParseBindAddress, Forms) {
  EXPECT_EQ(parse_bind_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_EQ(parse_bind_address("[::1]:0"), (std::pair<std::string, int>{"::1", 0}));
  EXPECT_THROW(parse_bind_address("localhost"), BadParameter);
  EXPECT_THROW(parse_bind_address("h:99999"), BadParameter);
}

// ---- filtering --------------------------------------------------------------

TEST(ApplyFilter, ConjunctionKeepsInputOrder) {
  using curio::testing::make_record;
  std::vector<ArtifactRecord> recs{make_record("C", "Goa", "Coin", "K", "Gold"),
                                   make_record("A", "Goa", "Coin", "K", "Silver"),
                                   make_record("B", "Pune", "Coin", "K", "Gold")};
  std::vector<FilterPair> none;
  EXPECT_EQ(apply_filter(recs, none).size(), 3u);
  std::vector<FilterPair> goa{{Dimension::OriginPlace, "Goa"}};
  auto out = apply_filter(recs, goa);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "C");
  EXPECT_EQ(out[1].id, "A");
  std::vector<FilterPair> both{{Dimension::OriginPlace, "Goa"}, {Dimension::Material, "Gold"}};
  EXPECT_EQ(apply_filter(recs, both).size(), 1u);
  std::vector<FilterPair> nocase{{Dimension::Material, "gold"}};
  EXPECT_TRUE(apply_filter(recs, nocase).empty());
}

TEST(ApplyFilter, MatchesLinearScanOnFixture) {
  auto cat = fixture_catalog();
  for (auto d : kAllDimensions) {
    for (const auto& [value, ids] : dimension_index(cat, d)) {
      std::vector<FilterPair> pairs{{d, value}};
      auto got = apply_filter(cat.records, pairs);
      std::vector<std::string> scan;
      for (const auto& r : cat.records) {
        if (r.dim(d) == value) scan.push_back(r.id);
      }
      std::vector<std::string> got_ids;
      for (const auto& r : got) got_ids.push_back(r.id);
      EXPECT_EQ(got_ids, scan) << dimension_name(d) << "=" << value;
    }
  }
}

// ---- VizService -------------------------------------------------------------

TEST(VizService, HealthMetaArtifact) {
  VizService svc(fixture_catalog());
  EXPECT_EQ(body(svc.health()), (json{{"status", "ok"}, {"records", 30}}));
  auto meta = body(svc.meta());
  EXPECT_EQ(meta.at("records"), 30);
  EXPECT_EQ(meta.at("portal_name"), "Fixture Portal");
  long total = 0;
  for (const auto& [value, n] : meta.at("dimensions").at("object_type").items()) total += n.get<long>();
  EXPECT_EQ(total, 30);
  auto found = svc.artifact("ASI-GOA-0005");
  EXPECT_EQ(found.status, 200);
  EXPECT_EQ(body(found).at("dims").at("material"), "Copper");
  auto missing = svc.artifact("nope");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(body(missing).at("error"), "NotFound");
}

TEST(VizService, BadRequestsNameTheProblem) {
  VizService svc(fixture_catalog());
  auto bad = svc.viz(VizKind::Treemap, {{"order", "color"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(body(bad).at("error"), "BadDimension");
  EXPECT_NE(body(bad).at("detail").get<std::string>().find("color"), std::string::npos);
  auto unknown = svc.viz(VizKind::Network, {{"zoom", "2"}});
  EXPECT_EQ(unknown.status, 400);
  EXPECT_NE(unknown.body.find("zoom"), std::string::npos);
}

TEST(VizService, ResponsesAreDeterministicAndShaped) {
  VizService svc(fixture_catalog());
  for (auto kind : {VizKind::Network, VizKind::Treemap, VizKind::Sunburst, VizKind::Polygon}) {
    auto a = svc.viz(kind, {});
    auto b = svc.viz(kind, {});
    ASSERT_EQ(a.status, 200) << a.body;
    EXPECT_EQ(a.body, b.body);
  }
  auto net = body(svc.viz(VizKind::Network, {{"iterations", "5"}}));
  EXPECT_EQ(net.at("params").at("iterations"), 5);
  auto tree = body(svc.viz(VizKind::Treemap, {}));
  EXPECT_EQ(tree.at("frame"), (json{{"w", 1000.0}, {"h", 600.0}}));
  EXPECT_EQ(tree.at("rects")[0].at("count"), 30);
  auto sun = body(svc.viz(VizKind::Sunburst, {{"order", "material"}}));
  for (const auto& arc : sun.at("arcs")) EXPECT_LE(arc.at("depth").get<int>(), 1);
  auto poly = body(svc.viz(VizKind::Polygon, {{"top_k", "3"}}));
  EXPECT_EQ(poly.at("axes").size(), 3u);
}

TEST(VizService, FilteredVizCountsOnlyMatches) {
  VizService svc(fixture_catalog());
  auto tree = body(svc.viz(VizKind::Treemap, {{"filter", "object_type:Coin"}}));
  EXPECT_EQ(tree.at("rects")[0].at("count"), 4);
  auto empty = svc.viz(VizKind::Polygon, {{"filter", "object_type:Lamp"}});
  EXPECT_EQ(empty.status, 200);
  EXPECT_TRUE(body(empty).at("axes").empty());
}

TEST(VizService, EmptyCatalogStillAnswers) {
  VizService svc(Catalog{"Empty", {}, "S"});
  for (auto kind : {VizKind::Network, VizKind::Treemap, VizKind::Sunburst, VizKind::Polygon}) {
    EXPECT_EQ(svc.viz(kind, {}).status, 200) << viz_name(kind);
  }
  TempDir dir("export");
  export_bundle(svc, dir.path());
  for (const char* name : {"catalog.json", "network.json", "treemap.json", "sunburst.json", "polygon.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
}

// ---- live server ------------------------------------------------------------

class LiveServer : public ::testing::Test {
 protected:
  void start(ServerOptions options) {
    options.host = "127.0.0.1";
    options.port = 0;
    service_ = std::make_shared<VizService>(fixture_catalog());
    server_ = std::make_unique<Server>(service_, options);
    port_ = server_->bind();
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int attempt = 0; attempt < 200; ++attempt) {
      if (auto r = client_->Get("/api/health"); r && r->status == 200) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL() << "server did not come up";
  }
  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }

  std::shared_ptr<VizService> service_;
  std::unique_ptr<Server> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(LiveServer, EndpointsMatchInProcessBodies) {
  start({});
  auto check = [&](const std::string& path, const Response& expected) {
    auto r = client_->Get(path);
    ASSERT_TRUE(r) << path;
    EXPECT_EQ(r->status, expected.status) << path;
    EXPECT_EQ(r->body, expected.body) << path;
    EXPECT_EQ(r->get_header_value("Content-Type").rfind("application/json", 0), 0u) << path;
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*") << path;
  };
  check("/api/health", service_->health());
  check("/api/catalog", service_->full_catalog());
  check("/api/catalog/meta", service_->meta());
  check("/api/artifacts/ASI-GOA-0001", service_->artifact("ASI-GOA-0001"));
  check("/api/artifacts/missing", service_->artifact("missing"));
  check("/api/viz/network", service_->viz(VizKind::Network, {}));
  check("/api/viz/treemap?order=material,dynasty", service_->viz(VizKind::Treemap, {{"order", "material,dynasty"}}));
  check("/api/viz/sunburst", service_->viz(VizKind::Sunburst, {}));
  check("/api/viz/polygon?top_k=4", service_->viz(VizKind::Polygon, {{"top_k", "4"}}));
  check("/api/viz/treemap?order=color", service_->viz(VizKind::Treemap, {{"order", "color"}}));

  auto lost = client_->Get("/api/nothing");
  ASSERT_TRUE(lost);
  EXPECT_EQ(lost->status, 404);
  EXPECT_EQ(json::parse(lost->body).at("error"), "NotFound");
}

TEST_F(LiveServer, ExportMatchesLiveResponses) {
  start({});
  TempDir dir("export");
  export_bundle(*service_, dir.path());
  const std::pair<const char*, const char*> pairs[] = {
      {"catalog.json", "/api/catalog"},
      {"network.json", "/api/viz/network"},
      {"treemap.json", "/api/viz/treemap"},
      {"sunburst.json", "/api/viz/sunburst"},
      {"polygon.json", "/api/viz/polygon"},
  };
  for (const auto& [file, path] : pairs) {
    auto r = client_->Get(path);
    ASSERT_TRUE(r);
    EXPECT_EQ(io::read_file(dir / file), r->body) << file;
  }
}

TEST_F(LiveServer, ServesStaticFilesAtRoot) {
  ServerOptions options;
  options.static_dir = CURIO_WEB_DIR;
  start(options);
  auto r = client_->Get("/");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_NE(r->body.find("<html"), std::string::npos);
}

TEST(Server, MissingStaticDirIsBindError) {
  ServerOptions options;
  options.static_dir = "/nonexistent/web";
  EXPECT_THROW(Server(std::make_shared<VizService>(Catalog{}), options), BindError);
}

TEST(Server, CorsCanBeDisabled) {
  ServerOptions options;
  options.port = 0;
  options.cors_origin = "";
  auto svc = std::make_shared<VizService>(Catalog{});
  Server server(svc, options);
  int port = server.bind();
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  httplib::Result r;
  for (int attempt = 0; attempt < 200 && !(r = client.Get("/api/health")); ++attempt) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_TRUE(r);
  EXPECT_FALSE(r->has_header("Access-Control-Allow-Origin"));
  server.stop();
  t.join();
}

}  // namespace
}  // namespace curio::service
