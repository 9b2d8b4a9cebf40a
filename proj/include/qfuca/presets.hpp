// SPDX-License-Identifier: Apache-2.0
//
// Shipped array presets. All four share a 25-element physical budget and a
// 4 m aggregate radius at 5.8 GHz; they differ in how many index levels
// address those elements. Sub-circle radii follow a tangency rule (adjacent
// cells touch); the higher-level presets collapse their innermost radii to
// zero, which stacks several logical indices onto each physical element.
// The source material for these layouts gives no numeric coordinates, so
// the presets are documented reconstructions, not ground truth.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qfuca/config.hpp"

namespace qfuca {

struct Preset {
    std::string id;
    std::string description;
    ArrayConfig config;
};

namespace detail {

// Split an aggregate radius across two levels so that adjacent inner cells
// placed on the outer circle touch: 2 R_out sin(pi/K_out) = 2 R_in.
inline std::pair<double, double> tangent_split(double aggregate, int k_out) {
    const double s = std::sin(std::numbers::pi / k_out);
    const double outer = aggregate / (1.0 + s);
    return {aggregate - outer, outer};
}

}  // namespace detail

inline std::vector<Preset> make_presets() {
    constexpr double kRadius = 4.0;       // aggregate radius, meters
    constexpr double kDistance = 100.0;   // default boresight separation, meters
    constexpr double kCarrier = 5.8e9;    // Hz
    constexpr double kPower = 1.0;        // watts
    const double kNoise = kPower * std::pow(10.0, -1.5);  // 15 dB default SNR

    const auto [inner, outer] = detail::tangent_split(kRadius, 5);

    std::vector<Preset> list;
    list.push_back({"1d-25",
                    "single ring, 25 elements on radius 4 m",
                    ArrayConfig::symmetric({25}, {kRadius}, kDistance, kCarrier, 1.0, kPower, kNoise)});
    list.push_back({"2d-5x5",
                    "5 tangent rings of 5 elements; 25 logical = 25 physical",
                    ArrayConfig::symmetric({5, 5}, {inner, outer}, kDistance, kCarrier, 1.0, kPower,
                                           kNoise)});
    list.push_back({"3d-25",
                    "5x5x5 indexing with zero innermost radius; 125 logical streams share 25 "
                    "physical elements",
                    ArrayConfig::symmetric({5, 5, 5}, {0.0, inner, outer}, kDistance, kCarrier, 1.0,
                                           kPower, kNoise)});
    list.push_back({"4d-25",
                    "5x5x5x5 indexing, two zero inner radii; 625 logical streams share the same 25 "
                    "physical elements as 3d-25",
                    ArrayConfig::symmetric({5, 5, 5, 5}, {0.0, 0.0, inner, outer}, kDistance,
                                           kCarrier, 1.0, kPower, kNoise)});
    return list;
}

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = make_presets();
    return list;
}

inline const Preset& preset(const std::string& id) {
    for (const Preset& p : presets())
        if (p.id == id) return p;
    throw config_error("preset", "unknown preset id '" + id + "' (see the presets subcommand)");
}

}  // namespace qfuca
