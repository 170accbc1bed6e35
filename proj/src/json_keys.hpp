#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>

#include "vafer/errors.hpp"

namespace vafer::detail {

// Config objects are parsed leniently on values but strictly on names: a
// misspelt key would otherwise fall back to its default without a word.
inline void require_keys_from(const nlohmann::json& j, std::string_view what,
                              std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", what));
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw ConfigError(fmt::format("unknown key \"{}\" in {}", key, what));
    }
}

}  // namespace vafer::detail
