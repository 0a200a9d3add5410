#include "curio/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "curio/digest.hpp"
#include "curio/errors.hpp"
#include "curio/html.hpp"
#include "curio/io.hpp"

namespace curio {

namespace {

constexpr std::array<std::string_view, 4> kDimensionNames{"origin_place", "object_type", "dynasty",
                                                          "material"};

std::string field_or_empty(const harvest::RawArtifact& raw, const std::string& name) {
  auto it = raw.fields.find(name);
  return it == raw.fields.end() ? std::string() : html::collapse_whitespace(it->second);
}

bool is_mandatory(std::string_view name) {
  return std::find(harvest::kMandatoryFields.begin(), harvest::kMandatoryFields.end(), name) !=
         harvest::kMandatoryFields.end();
}

bool is_trimmed(std::string_view s) {
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  return s.empty() || (!space(s.front()) && !space(s.back()));
}

std::string string_field(const nlohmann::json& obj, const char* key, long index,
                         const std::string& path, bool non_empty) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(index, path, "missing");
  if (!it->is_string()) throw SchemaError(index, path, "must be a string");
  auto value = it->get<std::string>();
  if (non_empty && value.empty()) throw SchemaError(index, path, "must not be empty");
  if (!is_trimmed(value)) throw SchemaError(index, path, "has surrounding whitespace");
  return value;
}

}  // namespace

std::string_view dimension_name(Dimension d) { return kDimensionNames[static_cast<std::size_t>(d)]; }

std::optional<Dimension> dimension_from_name(std::string_view name) {
  for (auto d : kAllDimensions) {
    if (dimension_name(d) == name) return d;
  }
  return std::nullopt;
}

Dimension parse_dimension(std::string_view name) {
  if (auto d = dimension_from_name(name)) return *d;
  throw BadDimension("unknown dimension '" + std::string(name) +
                     "' (expected origin_place, object_type, dynasty or material)");
}

const ArtifactRecord* Catalog::find(std::string_view id) const {
  auto it = std::lower_bound(records.begin(), records.end(), id,
                             [](const ArtifactRecord& r, std::string_view key) { return r.id < key; });
  return it != records.end() && it->id == id ? &*it : nullptr;
}

std::string title_case(std::string_view value) {
  std::string out(value);
  bool word_start = true;
  for (char& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalpha(u)) {
      c = static_cast<char>(word_start ? std::toupper(u) : std::tolower(u));
      word_start = false;
    } else if (c == ' ' || c == '-' || c == '/' || c == '(' || c == '&') {
      word_start = true;
    } else {
      word_start = false;
    }
  }
  return out;
}

ArtifactRecord normalize(const harvest::RawArtifact& raw) {
  ArtifactRecord rec;
  const auto title = field_or_empty(raw, "title");
  const auto accession = field_or_empty(raw, "accession_no");
  if (title.empty() && accession.empty()) {
    throw Unidentifiable("record from " + raw.source_url + " has neither title nor accession_no");
  }
  rec.title = title.empty() ? accession : title;
  rec.id = accession.empty() ? sha256_hex(raw.source_url).substr(0, 16) : accession;
  rec.source_url = html::collapse_whitespace(raw.source_url);
  for (auto d : kAllDimensions) {
    auto value = title_case(field_or_empty(raw, std::string(dimension_name(d))));
    rec.dim(d) = value.empty() ? std::string(kUnknown) : value;
  }
  for (const auto& [name, value] : raw.fields) {
    if (is_mandatory(name)) continue;
    auto clean = html::collapse_whitespace(value);
    if (!clean.empty()) rec.extras.emplace(name, std::move(clean));
  }
  return rec;
}

BuildResult build_catalog(std::span<const harvest::RawArtifact> raws, std::string portal_name,
                          std::string built_at) {
  BuildResult out;
  out.catalog.portal_name = std::move(portal_name);
  out.catalog.built_at = std::move(built_at);

  std::vector<ArtifactRecord> normalized;
  normalized.reserve(raws.size());
  for (const auto& raw : raws) {
    try {
      normalized.push_back(normalize(raw));
    } catch (const Unidentifiable& e) {
      out.rejects.push_back({raw.source_url, "Unidentifiable", e.what()});
    }
  }
  auto key = [](const ArtifactRecord& r) {
    return std::tie(r.id, r.source_url, r.title, r.dims, r.extras);
  };
  std::sort(normalized.begin(), normalized.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  for (auto& rec : normalized) {
    if (!out.catalog.records.empty() && out.catalog.records.back().id == rec.id) {
      out.rejects.push_back({rec.source_url, "Duplicate",
                             "id " + rec.id + " already taken by " +
                                 out.catalog.records.back().source_url});
      continue;
    }
    out.catalog.records.push_back(std::move(rec));
  }
  return out;
}

DimensionIndex dimension_index(std::span<const ArtifactRecord> records, Dimension d) {
  DimensionIndex index;
  for (const auto& rec : records) index[rec.dim(d)].push_back(rec.id);
  for (auto& [_, ids] : index) std::sort(ids.begin(), ids.end());
  return index;
}

nlohmann::json to_json(const ArtifactRecord& record) {
  nlohmann::json dims = nlohmann::json::object();
  for (auto d : kAllDimensions) dims[std::string(dimension_name(d))] = record.dim(d);
  return {{"id", record.id},
          {"title", record.title},
          {"source_url", record.source_url},
          {"dims", std::move(dims)},
          {"extras", record.extras}};
}

nlohmann::json to_json(const Catalog& catalog) {
  auto records = nlohmann::json::array();
  for (const auto& r : catalog.records) records.push_back(to_json(r));
  return {{"portal_name", catalog.portal_name},
          {"built_at", catalog.built_at},
          {"records", std::move(records)}};
}

Catalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError(-1, "<root>", "must be an object");
  Catalog cat;
  cat.portal_name = string_field(doc, "portal_name", -1, "portal_name", false);
  cat.built_at = string_field(doc, "built_at", -1, "built_at", false);
  auto records = doc.find("records");
  if (records == doc.end() || !records->is_array()) {
    throw SchemaError(-1, "records", "must be an array");
  }
  for (std::size_t i = 0; i < records->size(); ++i) {
    const auto& item = (*records)[i];
    const long index = static_cast<long>(i);
    if (!item.is_object()) throw SchemaError(index, "<record>", "must be an object");
    ArtifactRecord rec;
    rec.id = string_field(item, "id", index, "id", true);
    rec.title = string_field(item, "title", index, "title", true);
    rec.source_url = string_field(item, "source_url", index, "source_url", false);
    auto dims = item.find("dims");
    if (dims == item.end() || !dims->is_object()) throw SchemaError(index, "dims", "must be an object");
    for (auto d : kAllDimensions) {
      std::string name(dimension_name(d));
      rec.dim(d) = string_field(*dims, name.c_str(), index, name, true);
    }
    for (const auto& [key, _] : dims->items()) {
      if (!dimension_from_name(key)) throw SchemaError(index, "dims." + key, "unknown dimension");
    }
    if (auto extras = item.find("extras"); extras != item.end()) {
      if (!extras->is_object()) throw SchemaError(index, "extras", "must be an object");
      for (const auto& [key, value] : extras->items()) {
        if (!value.is_string()) throw SchemaError(index, "extras." + key, "must be a string");
        rec.extras.emplace(key, value.get<std::string>());
      }
    }
    if (!cat.records.empty()) {
      const auto& prev = cat.records.back().id;
      if (prev == rec.id) throw SchemaError(index, "id", "duplicate id " + rec.id);
      if (rec.id < prev) throw SchemaError(index, "id", "records not sorted by id");
    }
    cat.records.push_back(std::move(rec));
  }
  return cat;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  io::write_file(path, io::pretty(to_json(catalog)));
}

Catalog load_catalog(const std::filesystem::path& path) {
  return catalog_from_json(io::parse_json(io::read_file(path), path.string()));
}

}  // namespace curio
