#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ecomason {

// Sorted keys, floats at 6 significant digits, non-finite numbers as null.
nlohmann::json canonicalize(const nlohmann::json& value);
std::string canonical_dump(const nlohmann::json& value);

std::uint64_t fnv1a64(std::string_view text);
std::string hex_digest(std::string_view text);

}  // namespace ecomason
