#include "ecomason/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ecomason {

nlohmann::json canonicalize(const nlohmann::json& value) {
    using nlohmann::json;
    switch (value.type()) {
        case json::value_t::object: {
            json out = json::object();
            for (auto it = value.begin(); it != value.end(); ++it) out[it.key()] = canonicalize(it.value());
            return out;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto& v : value) out.push_back(canonicalize(v));
            return out;
        }
        case json::value_t::number_float: {
            const double v = value.get<double>();
            if (!std::isfinite(v)) return nullptr;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            const double rounded = std::strtod(buf, nullptr);
            if (rounded == std::floor(rounded) && std::abs(rounded) < 1e15)
                return static_cast<std::int64_t>(rounded);
            return rounded;
        }
        default: return value;
    }
}

std::string canonical_dump(const nlohmann::json& value) { return canonicalize(value).dump(); }

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_digest(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

}  // namespace ecomason
