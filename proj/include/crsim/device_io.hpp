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

// Device configuration files:
//
//   {
//     "name": "three_transmon",
//     "transmons": [{"EC_GHz": 0.30783, "EJ_GHz": 11.914}, ...],
//     "resonator": {"omega_GHz": 7.0, "levels": 4},
//     "couplings_GHz": [0.07, 0.07, 0.07],
//     "charge_cutoff": 15,
//     "transmon_levels": 4
//   }

#pragma once

#include <string>

#include <json.hpp>

#include "crsim/device.hpp"

namespace crsim {

using json = nlohmann::json;

/// Parses and validates; InputError messages name the offending field.
DeviceSpec device_from_json(const json& j);
json device_to_json(const DeviceSpec& device);

/// Reads a file; syntax errors report line and column.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

DeviceSpec load_device(const std::string& path);

} // namespace crsim
