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


// Shared fixtures for the unit and property tests.

#pragma once

#include <string>

#include "crsim/device.hpp"
#include "crsim/device_io.hpp"
#include "crsim/pulse_io.hpp"

namespace crsim::testing {

inline std::string data_path(const std::string& rel) { return std::string(CRSIM_TEST_DATA_DIR) + "/" + rel; }

inline DeviceSpec three_transmon() { return load_device(data_path("devices/three_transmon.json")); }
inline DeviceSpec two_transmon() { return load_device(data_path("devices/two_transmon.json")); }

inline DeviceSpec uncoupled(DeviceSpec d)
{
    for (auto& g : d.couplings_ghz)
        g = 0.0;
    return d;
}

inline GateRecord record(const std::string& file, const std::string& label)
{
    return load_pulse_file(data_path("pulses/" + file)).find(label);
}

} // namespace crsim::testing
