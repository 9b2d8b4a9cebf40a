// SPDX-License-Identifier: Apache-2.0
//
// Element placement for the recursive circle-of-circles array. Every level
// contributes one circular offset; the position of a logical element is the
// plain vector sum of those offsets in one global frame whose x-axis points
// toward the digit-0 cell of every level. Adjacent cells may land on the
// same physical spot; the layout keeps the logical->physical surjection and
// the resulting sharing count.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "qfuca/config.hpp"
#include "qfuca/indexing.hpp"

namespace qfuca {

// Position of the logical element `digits` (level 1 first). The tx plane is
// z = 0, the rx plane z = D, boresight on the z-axis.
inline Eigen::Vector3d element_position(const ArrayConfig& config,
                                        std::span<const int> digits, Side side) {
    const MixedRadix radix = config.radix(side);
    if (!radix.valid(digits))
        throw std::out_of_range(std::string("element_position: digit out of range for side ") +
                                side_name(side));
    const auto& radii = (side == Side::tx) ? config.radii_tx : config.radii_rx;
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    for (std::size_t n = 0; n < radii.size(); ++n) {
        const double alpha =
            2.0 * std::numbers::pi * static_cast<double>(digits[n]) / static_cast<double>(radix.counts()[n]);
        pos.x() += radii[n] * std::cos(alpha);
        pos.y() += radii[n] * std::sin(alpha);
    }
    if (side == Side::rx) pos.z() = config.distance_m;
    return pos;
}

struct ElementLayout {
    MixedRadix radix;
    Side side = Side::tx;
    double merge_tol_m = 0.0;
    std::vector<Eigen::Vector3d> logical_positions;   // indexed by linear logical index
    std::vector<int> logical_to_physical;             // surjection onto [0, physical_count)
    std::vector<Eigen::Vector3d> physical_positions;  // deduplicated inventory
    std::size_t shared_count = 0;                     // |logical| - |physical|

    std::size_t logical_count() const { return logical_positions.size(); }
    std::size_t physical_count() const { return physical_positions.size(); }
};

// Enumerates all logical indices and merges positions closer than
// merge_tol into one physical element (union-find, so chains of close
// positions collapse together). merge_tol = 0 merges exact duplicates only.
inline ElementLayout build_layout(const ArrayConfig& config, Side side, double merge_tol) {
    if (!(merge_tol >= 0.0))
        throw std::invalid_argument("build_layout: merge_tol must be >= 0");

    ElementLayout layout;
    layout.radix = config.radix(side);
    layout.side = side;
    layout.merge_tol_m = merge_tol;

    const std::size_t m = layout.radix.size();
    layout.logical_positions.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto digits = layout.radix.digits(i);
        layout.logical_positions.push_back(element_position(config, digits, side));
    }

    std::vector<std::size_t> parent(m);
    for (std::size_t i = 0; i < m; ++i) parent[i] = i;
    auto find = [&parent](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = (layout.logical_positions[i] - layout.logical_positions[j]).norm();
            if (d <= merge_tol) {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }

    // Physical ids in first-seen logical order, position taken from the
    // first member of each group.
    layout.logical_to_physical.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t root = find(i);
        if (layout.logical_to_physical[root] < 0) {
            layout.logical_to_physical[root] = static_cast<int>(layout.physical_positions.size());
            layout.physical_positions.push_back(layout.logical_positions[root]);
        }
        layout.logical_to_physical[i] = layout.logical_to_physical[root];
    }
    layout.shared_count = m - layout.physical_positions.size();
    return layout;
}

struct LayoutSummary {
    std::size_t logical_streams = 0;   // prod of per-level counts
    std::size_t physical_elements = 0; // N_t after dedup
    bool more_streams_than_elements = false;
    double aggregate_radius_m = 0.0;
};

inline LayoutSummary layout_summary(const ElementLayout& layout, const ArrayConfig& config) {
    LayoutSummary s;
    s.logical_streams = layout.logical_count();
    s.physical_elements = layout.physical_count();
    s.more_streams_than_elements = s.logical_streams > s.physical_elements;
    s.aggregate_radius_m = config.aggregate_radius(layout.side);
    return s;
}

}  // namespace qfuca
