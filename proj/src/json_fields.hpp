// Copyright 2026 The crsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Internal: typed JSON field access with path-qualified error messages.

#pragma once

#include <string>
#include <type_traits>

#include <json.hpp>

#include "crsim/common.hpp"

namespace crsim::detail {

inline const nlohmann::json& member(const nlohmann::json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object())
        throw InputError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw InputError(where + "." + key + ": missing field");
    return *it;
}

template <class T>
T field(const nlohmann::json& j, const std::string& key, const std::string& where)
{
    const nlohmann::json& v = member(j, key, where);
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string())
            throw InputError(where + "." + key + ": expected a string");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer())
            throw InputError(where + "." + key + ": expected an integer");
    } else {
        if (!v.is_number())
            throw InputError(where + "." + key + ": expected a number");
    }
    return v.get<T>();
}

} // namespace crsim::detail
