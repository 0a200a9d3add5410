#pragma once

#include <string>
#include <string_view>

namespace curio::url {

/// Resolves `reference` against the absolute URL `base` (RFC 3986 section 5,
/// dot segments removed). The fragment of the result is dropped.
std::string resolve(std::string_view base, std::string_view reference);

/// "scheme://authority" of an absolute URL, lower-cased; "" if not absolute.
std::string origin(std::string_view absolute);

bool is_absolute(std::string_view candidate);

}  // namespace curio::url
