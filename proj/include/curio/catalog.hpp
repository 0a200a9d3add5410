#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "curio/harvester.hpp"

namespace curio {

/// The four categorical facets every artifact is classified along.
enum class Dimension { OriginPlace = 0, ObjectType = 1, Dynasty = 2, Material = 3 };

inline constexpr std::array<Dimension, 4> kAllDimensions{
    Dimension::OriginPlace, Dimension::ObjectType, Dimension::Dynasty, Dimension::Material};

inline constexpr std::string_view kUnknown = "Unknown";

/// "origin_place", "object_type", "dynasty", "material".
std::string_view dimension_name(Dimension d);
std::optional<Dimension> dimension_from_name(std::string_view name);
/// Throws BadDimension naming the offending input.
Dimension parse_dimension(std::string_view name);

struct ArtifactRecord {
  std::string id;
  std::string title;
  std::array<std::string, 4> dims;  // indexed by Dimension
  std::string source_url;
  std::map<std::string, std::string> extras;

  const std::string& dim(Dimension d) const { return dims[static_cast<std::size_t>(d)]; }
  std::string& dim(Dimension d) { return dims[static_cast<std::size_t>(d)]; }

  bool operator==(const ArtifactRecord&) const = default;
};

struct Catalog {
  std::string portal_name;
  std::vector<ArtifactRecord> records;  // sorted by id, ids unique
  std::string built_at;

  const ArtifactRecord* find(std::string_view id) const;

  bool operator==(const Catalog&) const = default;
};

/// Title-cases each word: first letter upper, the rest lower (ASCII only).
/// Words start after a space, '-', '/', '(' or '&'.
std::string title_case(std::string_view value);

/// Cleans one harvested record. Throws Unidentifiable when both title and
/// accession_no are empty.
///
/// - whitespace collapsed everywhere, dimension values title-cased, empty
///   dimensions become "Unknown";
/// - id is accession_no when present, else the first 16 hex digits of
///   sha256(source_url);
/// - a missing title falls back to the accession number;
/// - non-mandatory fields with a value are kept in `extras`.
ArtifactRecord normalize(const harvest::RawArtifact& raw);

struct Reject {
  std::string source_url;
  std::string reason;  // "Unidentifiable" | "Duplicate"
  std::string detail;

  bool operator==(const Reject&) const = default;
};

struct BuildResult {
  Catalog catalog;
  std::vector<Reject> rejects;
};

/// Normalizes and de-duplicates. Records are processed in a canonical order
/// (id, then source_url, then title) so the first of any duplicate-id group
/// wins regardless of input order; the output is sorted by id.
BuildResult build_catalog(std::span<const harvest::RawArtifact> raws, std::string portal_name,
                          std::string built_at);

using DimensionIndex = std::map<std::string, std::vector<std::string>>;

/// value -> sorted ids. Every record lands in exactly one bucket.
DimensionIndex dimension_index(std::span<const ArtifactRecord> records, Dimension d);
inline DimensionIndex dimension_index(const Catalog& cat, Dimension d) {
  return dimension_index(cat.records, d);
}

nlohmann::json to_json(const ArtifactRecord& record);
nlohmann::json to_json(const Catalog& catalog);

/// Validating conversion. Throws SchemaError naming record index and field.
Catalog catalog_from_json(const nlohmann::json& doc);

/// Throws IoError.
void save_catalog(const Catalog& catalog, const std::filesystem::path& path);
/// Throws IoError, ParseError, SchemaError.
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace curio
