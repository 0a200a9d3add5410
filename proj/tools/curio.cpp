// curio: harvest -> build -> serve/export pipeline for museum collection portals.

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "curio/catalog.hpp"
#include "curio/digest.hpp"
#include "curio/errors.hpp"
#include "curio/harvester.hpp"
#include "curio/service.hpp"
#include "curio/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kPartial = 2;

struct HarvestArgs {
  std::string blueprint;
  std::string out;
  std::string fixtures;
  std::string stamp;
  std::string user_agent;
  bool keep_going = false;
};

struct BuildArgs {
  std::string raw;
  std::string out;
  std::string portal;
  std::string stamp;
};

struct ServeArgs {
  std::string catalog;
  std::string bind = "127.0.0.1:8080";
  std::string static_dir;
  std::string cors = "*";
};

struct ExportArgs {
  std::string catalog;
  std::string out;
};

int run_harvest(const HarvestArgs& args) {
  auto bp = curio::harvest::load_blueprint(args.blueprint);
  if (!args.fixtures.empty()) bp.fixture_dir = args.fixtures;

  curio::harvest::HttpOptions http;
  if (!args.user_agent.empty()) http.user_agent = args.user_agent;
  auto source = curio::harvest::make_page_source(bp, http);

  curio::harvest::HarvestOptions options;
  options.keep_going = args.keep_going;
  if (!args.stamp.empty()) options.stamp = args.stamp;

  auto result = curio::harvest::harvest(bp, *source, options);
  curio::harvest::write_harvest(result, args.out);

  const auto& report = result.report;
  std::cout << "harvested " << report.records_extracted << " records from "
            << report.pages_fetched << "/" << report.pages_requested << " listing pages ("
            << report.detail_urls << " detail urls, " << report.suspects.size() << " suspect, "
            << report.failures.size() << " failed)\n";
  for (const auto& w : report.warnings) {
    std::cerr << "warning: " << w.kind << " on page " << w.page << " (" << w.url << ")\n";
  }
  for (const auto& f : report.failures) {
    std::cerr << "failed: " << f.stage << " " << f.url << ": " << f.cause << "\n";
  }
  return report.failures.empty() ? kOk : kPartial;
}

int run_build(const BuildArgs& args) {
  auto raws = curio::harvest::load_raw_artifacts(args.raw);
  auto stamp = args.stamp.empty() ? curio::utc_timestamp_now() : args.stamp;
  auto result = curio::build_catalog(raws, args.portal, stamp);
  curio::save_catalog(result.catalog, args.out);
  std::cout << "catalog: " << result.catalog.records.size() << " records, "
            << result.rejects.size() << " rejects -> " << args.out << "\n";
  for (const auto& r : result.rejects) {
    std::cerr << "rejected (" << r.reason << "): " << r.source_url << ": " << r.detail << "\n";
  }
  return kOk;
}

int run_serve(const ServeArgs& args) {
  auto service = std::make_shared<const curio::service::VizService>(curio::load_catalog(args.catalog));
  auto [host, port] = curio::service::parse_bind_address(args.bind);
  curio::service::ServerOptions options;
  options.host = host;
  options.port = port;
  options.cors_origin = args.cors;
  if (!args.static_dir.empty()) options.static_dir = args.static_dir;
  curio::service::Server server(service, options);
  int bound = server.bind();
  std::cout << "serving " << service->catalog().records.size() << " records on http://" << host
            << ":" << bound << "/" << std::endl;
  server.listen();
  return kOk;
}

int run_export(const ExportArgs& args) {
  curio::service::export_bundle(args.catalog, args.out);
  std::cout << "exported 5 files to " << args.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harvest museum portal metadata and serve collection visualizations"};
  app.set_version_flag("--version", std::string("curio ") + curio::kVersion);
  app.require_subcommand(1);

  HarvestArgs harvest;
  auto* harvest_cmd = app.add_subcommand("harvest", "Fetch listing and detail pages per a blueprint");
  harvest_cmd->add_option("--blueprint", harvest.blueprint, "Blueprint JSON file")->required();
  harvest_cmd->add_option("--out", harvest.out, "Output directory")->required();
  harvest_cmd->add_option("--fixtures", harvest.fixtures, "Read pages from this fixture directory");
  harvest_cmd->add_flag("--keep-going", harvest.keep_going, "Record fetch failures and continue");
  harvest_cmd->add_option("--stamp", harvest.stamp, "Fixed ISO-8601 fetch timestamp");
  harvest_cmd->add_option("--user-agent", harvest.user_agent, "HTTP User-Agent");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Normalize raw artifacts into a catalog");
  build_cmd->add_option("--raw", build.raw, "raw_artifacts.json")->required();
  build_cmd->add_option("--out", build.out, "Catalog JSON to write")->required();
  build_cmd->add_option("--portal", build.portal, "Portal name")->required();
  build_cmd->add_option("--stamp", build.stamp, "Fixed ISO-8601 build timestamp");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the visualization API and UI");
  serve_cmd->add_option("--catalog", serve.catalog, "Catalog JSON")->required();
  serve_cmd->add_option("--bind", serve.bind, "host:port")->capture_default_str();
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->add_option("--cors", serve.cors, "Access-Control-Allow-Origin value, empty to disable")
      ->capture_default_str();

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Write the static visualization bundle");
  export_cmd->add_option("--catalog", exp.catalog, "Catalog JSON")->required();
  export_cmd->add_option("--out", exp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kFailed;
  }

  try {
    if (*harvest_cmd) return run_harvest(harvest);
    if (*build_cmd) return run_build(build);
    if (*serve_cmd) return run_serve(serve);
    if (*export_cmd) return run_export(exp);
  } catch (const curio::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
