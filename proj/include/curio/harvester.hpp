#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "curio/html.hpp"

namespace curio::harvest {

inline constexpr std::array<std::string_view, 5> kMandatoryFields{
    "title", "origin_place", "object_type", "dynasty", "material"};

inline constexpr long kMaxPages = 10000;
inline constexpr long kDefaultDelayMs = 500;

/// Declarative description of a portal: where the listing pages are and
/// which selector yields each metadata field on a detail page.
///
/// Selectors are CSS. A field selector may end in `@attr` to take an
/// attribute of the first match instead of its text (e.g. `img.main@src`).
struct Blueprint {
  std::string portal_name;
  std::string list_url_template;  // exactly one "{page}"
  long page_start = 0;
  long page_end = 0;  // inclusive
  std::string item_link_selector;
  std::map<std::string, std::string> field_selectors;
  long request_delay_ms = kDefaultDelayMs;
  std::optional<std::filesystem::path> fixture_dir;

  std::string list_url(long page) const;
};

/// Validates and builds a Blueprint from its JSON form. A relative
/// `fixture_dir` is resolved against `base_dir`.
///
/// Throws MissingField, MalformedTemplate, InvalidBlueprint.
Blueprint parse_blueprint(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Throws IoError, ParseError plus everything parse_blueprint throws.
Blueprint load_blueprint(const std::filesystem::path& path);

struct RawArtifact {
  std::string source_url;
  std::map<std::string, std::string> fields;
  std::string fetched_at;

  bool operator==(const RawArtifact&) const = default;
};

/// Resolves a URL to page bytes. Implementations throw FetchError.
class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual std::string fetch(const std::string& url) = 0;
  virtual bool uses_network() const = 0;
};

/// Offline source: `url` is served from `<dir>/<sha256(url)>.html`.
class FixturePageSource final : public PageSource {
 public:
  explicit FixturePageSource(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string fetch(const std::string& url) override;
  bool uses_network() const override { return false; }

  static std::string file_name(std::string_view url);

 private:
  std::filesystem::path dir_;
};

/// Enforces a minimum interval between requests to the same origin.
class Throttle {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleeper = std::function<void(std::chrono::steady_clock::duration)>;

  explicit Throttle(std::chrono::milliseconds interval, Clock clock = {}, Sleeper sleeper = {});

  /// Blocks until a request to `origin` is allowed, then records it.
  void acquire(const std::string& origin);

 private:
  std::chrono::milliseconds interval_;
  Clock clock_;
  Sleeper sleeper_;
  std::map<std::string, std::chrono::steady_clock::time_point> last_;
};

std::string default_user_agent();

struct HttpOptions {
  std::string user_agent = default_user_agent();
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds delay{kDefaultDelayMs};
};

/// libcurl-backed source. Follows redirects; HTTP status >= 400 is a FetchError.
class HttpPageSource final : public PageSource {
 public:
  explicit HttpPageSource(HttpOptions options);
  ~HttpPageSource() override;
  HttpPageSource(const HttpPageSource&) = delete;
  HttpPageSource& operator=(const HttpPageSource&) = delete;

  std::string fetch(const std::string& url) override;
  bool uses_network() const override { return true; }

 private:
  HttpOptions options_;
  Throttle throttle_;
  void* curl_ = nullptr;
};

/// Fixture source when the blueprint names a fixture_dir, HTTP otherwise.
std::unique_ptr<PageSource> make_page_source(const Blueprint& bp, HttpOptions http = {});

struct Warning {
  std::string kind;  // "SelectorMiss"
  long page = 0;
  std::string url;

  bool operator==(const Warning&) const = default;
};

struct Failure {
  std::string url;
  std::string stage;  // "listing" | "detail"
  std::string cause;

  bool operator==(const Failure&) const = default;
};

struct UrlEnumeration {
  std::vector<std::string> urls;
  long pages_fetched = 0;
  std::vector<Warning> warnings;
  std::vector<Failure> failures;
};

/// Walks listing pages page_start..page_end and collects detail links,
/// absolute, fragment-free and de-duplicated in first-seen order. A matched
/// element contributes its own href, else the first descendant href.
///
/// Without `keep_going` the first FetchError propagates; with it the page
/// is recorded in `failures` and skipped.
UrlEnumeration enumerate_item_urls(const Blueprint& bp, PageSource& source, bool keep_going);

/// Never fails: unmatched selectors yield "".
RawArtifact extract_record(const html::Document& doc, const std::string& url, const Blueprint& bp,
                           const std::string& fetched_at);

/// True when every mandatory field is empty.
bool is_suspect(const RawArtifact& artifact);

struct HarvestOptions {
  bool keep_going = false;
  /// Replaces the fetch time on every record (reproducible output).
  std::optional<std::string> stamp;
};

struct HarvestReport {
  std::string portal_name;
  long pages_requested = 0;
  long pages_fetched = 0;
  long detail_urls = 0;
  long records_extracted = 0;
  std::vector<std::string> suspects;
  std::vector<Failure> failures;
  std::vector<Warning> warnings;
};

struct HarvestResult {
  std::vector<RawArtifact> records;
  HarvestReport report;
};

HarvestResult harvest(const Blueprint& bp, PageSource& source, const HarvestOptions& options = {});

nlohmann::json to_json(const RawArtifact& artifact);
nlohmann::json to_json(const HarvestReport& report);

/// Writes raw_artifacts.json and harvest_report.json into `out_dir`.
void write_harvest(const HarvestResult& result, const std::filesystem::path& out_dir);

/// Reads a raw_artifacts.json array. Throws IoError, ParseError, SchemaError.
std::vector<RawArtifact> load_raw_artifacts(const std::filesystem::path& path);

}  // namespace curio::harvest
