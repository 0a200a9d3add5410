#include "curio/harvester.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <set>
#include <thread>

#include "curio/digest.hpp"
#include "curio/errors.hpp"
#include "curio/io.hpp"
#include "curio/selector.hpp"
#include "curio/url.hpp"
#include "curio/version.hpp"

namespace curio::harvest {

namespace {

constexpr std::string_view kPagePlaceholder = "{page}";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t count = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) throw MissingField(key);
  return *it;
}

std::string require_string(const nlohmann::json& doc, const char* key) {
  const auto& value = require(doc, key);
  if (!value.is_string()) throw InvalidBlueprint(std::string(key) + " must be a string");
  return value.get<std::string>();
}

long require_integer(const nlohmann::json& doc, const char* key) {
  const auto& value = require(doc, key);
  if (!value.is_number_integer()) throw InvalidBlueprint(std::string(key) + " must be an integer");
  return value.get<long>();
}

html::Selector compile_or_throw(const std::string& what, const std::string& text) {
  try {
    return html::Selector::compile(text);
  } catch (const SelectorSyntaxError& e) {
    throw InvalidBlueprint(what + ": " + e.what());
  }
}

std::map<std::string, html::FieldSelector> compile_fields(const Blueprint& bp) {
  std::map<std::string, html::FieldSelector> compiled;
  for (const auto& [name, text] : bp.field_selectors) {
    try {
      compiled.emplace(name, html::FieldSelector::compile(text));
    } catch (const SelectorSyntaxError& e) {
      throw InvalidBlueprint("field_selectors." + name + ": " + e.what());
    }
  }
  return compiled;
}

std::string base_url_for(const html::Document& doc, const std::string& page_url) {
  static const auto base_selector = html::Selector::compile("base[href]");
  if (const auto* base = base_selector.select_first(doc.root())) {
    return url::resolve(page_url, *base->attr("href"));
  }
  return page_url;
}

std::optional<std::string> link_of(const html::Node& element) {
  if (auto href = element.attr("href")) return std::string(*href);
  static const auto any_href = html::Selector::compile("[href]");
  if (const auto* inner = any_href.select_first(element)) return std::string(*inner->attr("href"));
  return std::nullopt;
}

std::size_t write_callback(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

}  // namespace

std::string Blueprint::list_url(long page) const {
  std::string out = list_url_template;
  auto pos = out.find(kPagePlaceholder);
  if (pos != std::string::npos) out.replace(pos, kPagePlaceholder.size(), std::to_string(page));
  return out;
}

Blueprint parse_blueprint(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw InvalidBlueprint("blueprint must be a JSON object");
  static const std::set<std::string> known{"portal_name",       "list_url_template",
                                           "page_start",        "page_end",
                                           "item_link_selector", "field_selectors",
                                           "request_delay_ms",  "fixture_dir"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw InvalidBlueprint("unknown key: " + key);
  }

  Blueprint bp;
  bp.portal_name = require_string(doc, "portal_name");
  bp.list_url_template = require_string(doc, "list_url_template");
  bp.page_start = require_integer(doc, "page_start");
  bp.page_end = require_integer(doc, "page_end");
  bp.item_link_selector = require_string(doc, "item_link_selector");

  const auto& fields = require(doc, "field_selectors");
  if (!fields.is_object()) throw InvalidBlueprint("field_selectors must be an object");
  for (const auto& [name, value] : fields.items()) {
    if (!value.is_string()) throw InvalidBlueprint("field_selectors." + name + " must be a string");
    bp.field_selectors.emplace(name, value.get<std::string>());
  }
  for (auto name : kMandatoryFields) {
    if (!bp.field_selectors.contains(std::string(name))) throw MissingField(std::string(name));
  }

  if (auto it = doc.find("request_delay_ms"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw InvalidBlueprint("request_delay_ms must be an integer");
    bp.request_delay_ms = it->get<long>();
  }
  if (auto it = doc.find("fixture_dir"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw InvalidBlueprint("fixture_dir must be a string");
    std::filesystem::path dir = it->get<std::string>();
    bp.fixture_dir = dir.is_relative() && !base_dir.empty() ? base_dir / dir : dir;
  }

  auto placeholders = count_occurrences(bp.list_url_template, kPagePlaceholder);
  if (placeholders != 1) {
    throw MalformedTemplate("list_url_template must contain exactly one {page}, found " +
                            std::to_string(placeholders));
  }
  if (bp.page_start < 0) throw InvalidBlueprint("page_start must be >= 0");
  if (bp.page_end < bp.page_start) throw InvalidBlueprint("page_end must be >= page_start");
  if (bp.page_end - bp.page_start + 1 > kMaxPages) {
    throw InvalidBlueprint("page range exceeds " + std::to_string(kMaxPages) + " pages");
  }
  if (bp.request_delay_ms < 0) throw InvalidBlueprint("request_delay_ms must be >= 0");

  compile_or_throw("item_link_selector", bp.item_link_selector);
  compile_fields(bp);
  return bp;
}

Blueprint load_blueprint(const std::filesystem::path& path) {
  auto doc = io::parse_json(io::read_file(path), path.string());
  return parse_blueprint(doc, path.parent_path());
}

std::string FixturePageSource::file_name(std::string_view url) {
  return sha256_hex(url) + ".html";
}

std::string FixturePageSource::fetch(const std::string& url) {
  auto path = dir_ / file_name(url);
  if (!std::filesystem::is_regular_file(path)) {
    throw FetchError(url, "fixture file not found: " + path.string());
  }
  try {
    return io::read_file(path);
  } catch (const IoError& e) {
    throw FetchError(url, e.what());
  }
}

Throttle::Throttle(std::chrono::milliseconds interval, Clock clock, Sleeper sleeper)
    : interval_(interval), clock_(std::move(clock)), sleeper_(std::move(sleeper)) {
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
  if (!sleeper_) sleeper_ = [](auto d) { std::this_thread::sleep_for(d); };
}

void Throttle::acquire(const std::string& origin) {
  auto now = clock_();
  if (auto it = last_.find(origin); it != last_.end()) {
    auto ready = it->second + interval_;
    if (now < ready) {
      sleeper_(ready - now);
      now = clock_();
    }
  }
  last_[origin] = now;
}

std::string default_user_agent() {
  return std::string("curio-harvester/") + kVersion + " (+collection metadata harvester)";
}

HttpPageSource::HttpPageSource(HttpOptions options)
    : options_(std::move(options)), throttle_(options_.delay) {
  static CurlGlobal global;
  curl_ = curl_easy_init();
  if (!curl_) throw Error("CurlError", "curl_easy_init failed");
}

HttpPageSource::~HttpPageSource() { curl_easy_cleanup(static_cast<CURL*>(curl_)); }

std::string HttpPageSource::fetch(const std::string& target) {
  throttle_.acquire(url::origin(target));
  auto* curl = static_cast<CURL*>(curl_);
  curl_easy_reset(curl);
  std::string body;
  char error[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, target.c_str());
  curl_easy_setopt(curl, CURLOPT_USERAGENT, options_.user_agent.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_MAXREDIRS, 10L);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT_MS, static_cast<long>(options_.timeout.count()));
  curl_easy_setopt(curl, CURLOPT_ACCEPT_ENCODING, "");
  curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, error);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_callback);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  CURLcode rc = curl_easy_perform(curl);
  if (rc != CURLE_OK) {
    throw FetchError(target, error[0] ? error : curl_easy_strerror(rc));
  }
  long status = 0;
  curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  if (status >= 400) throw FetchError(target, "HTTP " + std::to_string(status));
  return body;
}

std::unique_ptr<PageSource> make_page_source(const Blueprint& bp, HttpOptions http) {
  if (bp.fixture_dir) return std::make_unique<FixturePageSource>(*bp.fixture_dir);
  http.delay = std::chrono::milliseconds(bp.request_delay_ms);
  return std::make_unique<HttpPageSource>(std::move(http));
}

UrlEnumeration enumerate_item_urls(const Blueprint& bp, PageSource& source, bool keep_going) {
  auto link_selector = compile_or_throw("item_link_selector", bp.item_link_selector);
  UrlEnumeration out;
  std::set<std::string> seen;
  for (long page = bp.page_start; page <= bp.page_end; ++page) {
    const std::string page_url = bp.list_url(page);
    std::string body;
    try {
      body = source.fetch(page_url);
    } catch (const FetchError& e) {
      if (!keep_going) throw;
      out.failures.push_back({e.url(), "listing", e.cause()});
      continue;
    }
    ++out.pages_fetched;
    auto doc = html::Document::parse(body);
    auto base = base_url_for(doc, page_url);
    auto matches = link_selector.select_all(doc.root());
    if (matches.empty()) {
      out.warnings.push_back({"SelectorMiss", page, page_url});
      continue;
    }
    for (const auto* element : matches) {
      auto href = link_of(*element);
      if (!href) continue;
      auto absolute = url::resolve(base, *href);
      if (!absolute.starts_with("http://") && !absolute.starts_with("https://")) continue;
      if (seen.insert(absolute).second) out.urls.push_back(std::move(absolute));
    }
  }
  return out;
}

RawArtifact extract_record(const html::Document& doc, const std::string& url, const Blueprint& bp,
                           const std::string& fetched_at) {
  RawArtifact artifact;
  artifact.source_url = url;
  artifact.fetched_at = fetched_at;
  for (const auto& [name, field] : compile_fields(bp)) {
    artifact.fields[name] = field.extract(doc.root());
  }
  return artifact;
}

bool is_suspect(const RawArtifact& artifact) {
  return std::all_of(kMandatoryFields.begin(), kMandatoryFields.end(), [&](std::string_view name) {
    auto it = artifact.fields.find(std::string(name));
    return it == artifact.fields.end() || it->second.empty();
  });
}

HarvestResult harvest(const Blueprint& bp, PageSource& source, const HarvestOptions& options) {
  HarvestResult result;
  auto& report = result.report;
  report.portal_name = bp.portal_name;
  report.pages_requested = bp.page_end - bp.page_start + 1;

  auto listing = enumerate_item_urls(bp, source, options.keep_going);
  report.pages_fetched = listing.pages_fetched;
  report.detail_urls = static_cast<long>(listing.urls.size());
  report.warnings = std::move(listing.warnings);
  report.failures = std::move(listing.failures);

  for (const auto& detail_url : listing.urls) {
    std::string body;
    try {
      body = source.fetch(detail_url);
    } catch (const FetchError& e) {
      if (!options.keep_going) throw;
      report.failures.push_back({e.url(), "detail", e.cause()});
      continue;
    }
    auto stamp = options.stamp ? *options.stamp : utc_timestamp_now();
    auto record = extract_record(html::Document::parse(body), detail_url, bp, stamp);
    if (is_suspect(record)) report.suspects.push_back(detail_url);
    result.records.push_back(std::move(record));
  }
  report.records_extracted = static_cast<long>(result.records.size());
  return result;
}

nlohmann::json to_json(const RawArtifact& artifact) {
  return {{"source_url", artifact.source_url},
          {"fields", artifact.fields},
          {"fetched_at", artifact.fetched_at}};
}

nlohmann::json to_json(const HarvestReport& report) {
  auto failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"url", f.url}, {"stage", f.stage}, {"cause", f.cause}});
  }
  auto warnings = nlohmann::json::array();
  for (const auto& w : report.warnings) {
    warnings.push_back({{"kind", w.kind}, {"page", w.page}, {"url", w.url}});
  }
  return {{"portal_name", report.portal_name},
          {"pages_requested", report.pages_requested},
          {"pages_fetched", report.pages_fetched},
          {"detail_urls", report.detail_urls},
          {"records_extracted", report.records_extracted},
          {"suspects", report.suspects},
          {"failures", std::move(failures)},
          {"warnings", std::move(warnings)}};
}

void write_harvest(const HarvestResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  auto records = nlohmann::json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  io::write_file(out_dir / "raw_artifacts.json", io::pretty(records));
  io::write_file(out_dir / "harvest_report.json", io::pretty(to_json(result.report)));
}

std::vector<RawArtifact> load_raw_artifacts(const std::filesystem::path& path) {
  auto doc = io::parse_json(io::read_file(path), path.string());
  if (!doc.is_array()) throw SchemaError(-1, "<root>", "raw artifacts file must be a JSON array");
  std::vector<RawArtifact> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const long index = static_cast<long>(i);
    if (!item.is_object()) throw SchemaError(index, "<record>", "must be an object");
    RawArtifact artifact;
    auto url = item.find("source_url");
    if (url == item.end() || !url->is_string() || url->get<std::string>().empty()) {
      throw SchemaError(index, "source_url", "must be a non-empty string");
    }
    artifact.source_url = url->get<std::string>();
    auto fields = item.find("fields");
    if (fields == item.end() || !fields->is_object()) {
      throw SchemaError(index, "fields", "must be an object");
    }
    for (const auto& [name, value] : fields->items()) {
      if (!value.is_string()) throw SchemaError(index, "fields." + name, "must be a string");
      artifact.fields.emplace(name, value.get<std::string>());
    }
    auto fetched = item.find("fetched_at");
    if (fetched != item.end()) {
      if (!fetched->is_string()) throw SchemaError(index, "fetched_at", "must be a string");
      artifact.fetched_at = fetched->get<std::string>();
    }
    out.push_back(std::move(artifact));
  }
  return out;
}

}  // namespace curio::harvest
