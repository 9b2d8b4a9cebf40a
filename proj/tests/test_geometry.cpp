// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "qfuca/geometry.hpp"
#include "qfuca/presets.hpp"

using namespace qfuca;
using Catch::Matchers::WithinAbs;

namespace {

ArrayConfig make_config(std::vector<int> counts, std::vector<double> radii, double d = 100.0) {
    return ArrayConfig::symmetric(std::move(counts), std::move(radii), d, 5.8e9);
}

// Independent oracle: evaluate the per-level offset sum in reverse level
// order with scalar accumulation.
Eigen::Vector3d position_oracle(const ArrayConfig& c, const std::vector<int>& digits, Side side) {
    const auto& radii = side == Side::tx ? c.radii_tx : c.radii_rx;
    const auto& counts = side == Side::tx ? c.counts_tx : c.counts_rx;
    double x = 0.0, y = 0.0;
    for (int n = static_cast<int>(radii.size()) - 1; n >= 0; --n) {
        const double a = 2.0 * std::numbers::pi * digits[static_cast<std::size_t>(n)] /
                         counts[static_cast<std::size_t>(n)];
        x += radii[static_cast<std::size_t>(n)] * std::cos(a);
        y += radii[static_cast<std::size_t>(n)] * std::sin(a);
    }
    return {x, y, side == Side::rx ? c.distance_m : 0.0};
}

// Independent dedup oracle: greedy clustering by pairwise scan.
std::size_t cluster_count_oracle(const std::vector<Eigen::Vector3d>& pts, double tol) {
    std::vector<Eigen::Vector3d> reps;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool placed = false;
        for (std::size_t c = 0; c < reps.size() && !placed; ++c)
            for (std::size_t m : members[c])
                if ((pts[i] - pts[m]).norm() <= tol) {
                    members[c].push_back(i);
                    placed = true;
                    break;
                }
        if (!placed) {
            reps.push_back(pts[i]);
            members.push_back({i});
        }
    }
    return reps.size();
}

}  // namespace

TEST_CASE("element positions, stated cases") {
    // single ring of four, first element on the x axis
    const ArrayConfig a = make_config({4}, {1.0});
    const Eigen::Vector3d p0 = element_position(a, std::vector<int>{0}, Side::tx);
    CHECK_THAT((p0 - Eigen::Vector3d(1, 0, 0)).norm(), WithinAbs(0.0, 1e-15));

    // degenerate point array sits on the boresight axis
    const ArrayConfig b = make_config({3, 2}, {0.0, 0.0});
    const Eigen::Vector3d pr = element_position(b, std::vector<int>{2, 1}, Side::rx);
    CHECK_THAT((pr - Eigen::Vector3d(0, 0, 100)).norm(), WithinAbs(0.0, 1e-15));

    // two-level sum of circle offsets
    const ArrayConfig c = make_config({2, 4}, {3.0, 1.0});
    const Eigen::Vector3d p = element_position(c, std::vector<int>{1, 1}, Side::tx);
    CHECK_THAT((p - Eigen::Vector3d(-3, 1, 0)).norm(), WithinAbs(0.0, 1e-12));

    CHECK_THROWS_AS(element_position(c, std::vector<int>{2, 0}, Side::tx), std::out_of_range);
}

TEST_CASE("positions agree with independent summation order") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> ct(1, 6);
    std::uniform_real_distribution<double> rad(0.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> counts(1 + static_cast<std::size_t>(trial % 4));
        std::vector<double> radii(counts.size());
        for (auto& k : counts) k = ct(rng);
        for (auto& r : radii) r = rad(rng);
        const ArrayConfig cfg = make_config(counts, radii, 50.0);
        const MixedRadix radix = cfg.radix(Side::tx);
        for (std::size_t i = 0; i < radix.size(); ++i) {
            const auto digits = radix.digits(i);
            const Eigen::Vector3d got = element_position(cfg, digits, Side::tx);
            CHECK_THAT((got - position_oracle(cfg, digits, Side::tx)).norm(), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("uniform-count digit shift rotates the layout") {
    // With equal counts per level, advancing every digit by one rotates all
    // positions by 2 pi / K about the boresight axis.
    for (const auto& counts : std::vector<std::vector<int>>{{25}, {5, 5}, {4, 4, 4}}) {
        std::vector<double> radii(counts.size());
        for (std::size_t n = 0; n < radii.size(); ++n) radii[n] = 0.5 + static_cast<double>(n);
        const ArrayConfig cfg = make_config(counts, radii);
        const MixedRadix radix = cfg.radix(Side::tx);
        const int k = counts[0];
        const double ang = 2.0 * std::numbers::pi / k;
        Eigen::Matrix3d rot;
        rot << std::cos(ang), -std::sin(ang), 0, std::sin(ang), std::cos(ang), 0, 0, 0, 1;
        for (std::size_t i = 0; i < radix.size(); ++i) {
            auto digits = radix.digits(i);
            const Eigen::Vector3d before = element_position(cfg, digits, Side::tx);
            for (auto& d : digits) d = (d + 1) % k;
            const Eigen::Vector3d after = element_position(cfg, digits, Side::tx);
            CHECK_THAT((after - rot * before).norm(), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("layout dedup") {
    SECTION("single ring never self-overlaps") {
        const ArrayConfig cfg = make_config({25}, {4.0});
        const ElementLayout layout = build_layout(cfg, Side::tx, 1e-6);
        CHECK(layout.physical_count() == 25);
        CHECK(layout.shared_count == 0);
    }

    SECTION("zero tolerance merges only exact duplicates") {
        // generic angle sets: no two offset sums coincide
        const ArrayConfig distinct = make_config({3, 4}, {4.0, 4.0});
        CHECK(build_layout(distinct, Side::tx, 0.0).shared_count == 0);

        // equal counts at right angles do produce exact coincidences
        // ((k1,k2) and (k2,k1) share the same sum); the dedup pass must
        // find exactly the pairwise-exact duplicates and nothing else
        const ArrayConfig coincident = make_config({4, 4}, {4.0, 4.0});
        const ElementLayout layout = build_layout(coincident, Side::tx, 0.0);
        CHECK(layout.physical_count() == cluster_count_oracle(layout.logical_positions, 0.0));
        CHECK(layout.shared_count == 6);
    }

    SECTION("zero inner radius stacks logical indices") {
        const ArrayConfig cfg = make_config({5, 5}, {0.0, 2.0});
        const ElementLayout layout = build_layout(cfg, Side::tx, 1e-9);
        CHECK(layout.physical_count() == 5);
        CHECK(layout.shared_count == 20);
        for (int p : layout.logical_to_physical) {
            CHECK(p >= 0);
            CHECK(p < 5);
        }
    }

    SECTION("pairwise-scan oracle agrees on the shipped presets") {
        for (const Preset& p : presets()) {
            const double tol = p.config.wavelength_m() / 100.0;
            const ElementLayout layout = build_layout(p.config, Side::tx, tol);
            CHECK(layout.physical_count() == cluster_count_oracle(layout.logical_positions, tol));
            CHECK(layout.physical_count() == 25);
        }
    }

    SECTION("dedup is idempotent") {
        const ArrayConfig cfg = preset("3d-25").config;
        const double tol = cfg.wavelength_m() / 100.0;
        const ElementLayout layout = build_layout(cfg, Side::tx, tol);
        // a second pass over the merged inventory finds nothing to merge
        CHECK(cluster_count_oracle(layout.physical_positions, tol) == layout.physical_count());
    }
}

TEST_CASE("layout summary") {
    const ArrayConfig ring = make_config({25}, {4.0});
    const LayoutSummary s1 = layout_summary(build_layout(ring, Side::tx, 1e-6), ring);
    CHECK(s1.logical_streams == 25);
    CHECK(s1.physical_elements == 25);
    CHECK_FALSE(s1.more_streams_than_elements);
    CHECK_THAT(s1.aggregate_radius_m, WithinAbs(4.0, 1e-15));

    const ArrayConfig quad = preset("4d-25").config;
    const LayoutSummary s4 = layout_summary(build_layout(quad, Side::tx, quad.wavelength_m() / 100.0), quad);
    CHECK(s4.logical_streams == 625);
    CHECK(s4.physical_elements == 25);
    CHECK(s4.more_streams_than_elements);
    CHECK_THAT(s4.aggregate_radius_m, WithinAbs(4.0, 1e-12));
}

TEST_CASE("config validation paths") {
    ArrayConfig bad = make_config({4}, {1.0});
    bad.counts_rx = {0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    try {
        bad.validate();
    } catch (const config_error& e) {
        CHECK(e.field() == "counts_rx[0]");
    }

    ArrayConfig neg = make_config({4}, {-1.0});
    CHECK_THROWS_AS(neg.validate(), config_error);
}
