#pragma once

#include <string>
#include <string_view>

namespace curio {

/// Lower-case hex SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

}  // namespace curio
