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

#include "crsim/device_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json_fields.hpp"

namespace crsim {

DeviceSpec device_from_json(const json& j)
{
    using detail::field;
    if (!j.is_object())
        throw InputError("device: top level must be an object");

    DeviceSpec d;
    d.name = j.value("name", std::string{});
    const int cutoff = j.contains("charge_cutoff") ? field<int>(j, "charge_cutoff", "device") : 15;
    const int levels = j.contains("transmon_levels") ? field<int>(j, "transmon_levels", "device") : 4;

    const json& ts = detail::member(j, "transmons", "device");
    if (!ts.is_array() || ts.empty())
        throw InputError("device.transmons: expected a non-empty array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string where = "device.transmons[" + std::to_string(i) + "]";
        TransmonSpec t;
        t.charging_energy_ghz = field<double>(ts[i], "EC_GHz", where);
        t.josephson_energy_ghz = field<double>(ts[i], "EJ_GHz", where);
        t.charge_cutoff = cutoff;
        t.kept_levels = levels;
        d.transmons.push_back(t);
    }

    const json& r = detail::member(j, "resonator", "device");
    d.resonator.frequency_ghz = field<double>(r, "omega_GHz", "device.resonator");
    d.resonator.kept_levels = r.contains("levels") ? field<int>(r, "levels", "device.resonator") : 4;

    const json& g = detail::member(j, "couplings_GHz", "device");
    if (!g.is_array())
        throw InputError("device.couplings_GHz: expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g[i].is_number())
            throw InputError("device.couplings_GHz[" + std::to_string(i) + "]: expected a number");
        d.couplings_ghz.push_back(g[i].get<double>());
    }

    try {
        d.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("device: ") + e.what());
    }
    return d;
}

json device_to_json(const DeviceSpec& d)
{
    json j;
    j["name"] = d.name;
    json ts = json::array();
    for (const auto& t : d.transmons)
        ts.push_back({{"EC_GHz", t.charging_energy_ghz}, {"EJ_GHz", t.josephson_energy_ghz}});
    j["transmons"] = ts;
    j["resonator"] = {{"omega_GHz", d.resonator.frequency_ghz}, {"levels", d.resonator.kept_levels}};
    j["couplings_GHz"] = d.couplings_ghz;
    j["charge_cutoff"] = d.transmons.empty() ? 15 : d.transmons.front().charge_cutoff;
    j["transmon_levels"] = d.transmons.empty() ? 4 : d.transmons.front().kept_levels;
    return j;
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << path << ":" << line << ":" << col << ": JSON syntax error";
        throw InputError(msg.str());
    }
}

void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << j.dump(2) << "\n";
}

DeviceSpec load_device(const std::string& path)
{
    try {
        return device_from_json(read_json_file(path));
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0)
            throw;
        throw InputError(path + ": " + what);
    }
}

} // namespace crsim
