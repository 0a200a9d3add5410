#pragma once

#include <stdexcept>
#include <string>

namespace curio {

/// Base of every error the library throws. `kind()` is a stable
/// machine-readable name used in CLI messages and HTTP error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CURIO_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

// blueprint / harvesting
CURIO_DEFINE_ERROR(ParseError);
CURIO_DEFINE_ERROR(MalformedTemplate);
CURIO_DEFINE_ERROR(InvalidBlueprint);
CURIO_DEFINE_ERROR(IoError);

class MissingField : public Error {
 public:
  explicit MissingField(std::string field)
      : Error("MissingField", "missing mandatory field selector: " + field),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class FetchError : public Error {
 public:
  FetchError(std::string url, std::string cause)
      : Error("FetchError", "fetch failed for " + url + ": " + cause),
        url_(std::move(url)),
        cause_(std::move(cause)) {}
  const std::string& url() const noexcept { return url_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string url_;
  std::string cause_;
};

class SelectorSyntaxError : public Error {
 public:
  SelectorSyntaxError(const std::string& selector, const std::string& why)
      : Error("SelectorSyntaxError", "bad selector '" + selector + "': " + why) {}
};

// catalog
CURIO_DEFINE_ERROR(Unidentifiable);
CURIO_DEFINE_ERROR(BadDimension);

class SchemaError : public Error {
 public:
  /// `record_index` is -1 for errors outside the records array.
  SchemaError(long record_index, std::string field, const std::string& why)
      : Error("SchemaError", describe(record_index, field, why)),
        record_index_(record_index),
        field_(std::move(field)) {}
  long record_index() const noexcept { return record_index_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string describe(long index, const std::string& field,
                              const std::string& why) {
    if (index < 0) return "catalog field '" + field + "': " + why;
    return "record " + std::to_string(index) + " field '" + field + "': " + why;
  }
  long record_index_;
  std::string field_;
};

// geometry
CURIO_DEFINE_ERROR(EmptyDims);
CURIO_DEFINE_ERROR(DegenerateFrame);
CURIO_DEFINE_ERROR(EmptyOrder);
CURIO_DEFINE_ERROR(DuplicateDimension);
CURIO_DEFINE_ERROR(DegenerateRadii);
CURIO_DEFINE_ERROR(InsufficientCategories);
CURIO_DEFINE_ERROR(InvalidArgument);

// service
CURIO_DEFINE_ERROR(BadParameter);
CURIO_DEFINE_ERROR(BindError);

#undef CURIO_DEFINE_ERROR

}  // namespace curio
