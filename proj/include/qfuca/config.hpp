// SPDX-License-Identifier: Apache-2.0
//
// Experiment description for a fractal circular-array link: per-level cell
// counts and radii for both ends, carrier, boresight separation, power and
// noise settings. Everything downstream (geometry, channel, pipeline) is a
// pure function of this value.

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfuca/indexing.hpp"

namespace qfuca {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Configuration problem, carries the offending field path for CLI reporting.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, std::string message)
        : std::runtime_error(field + ": " + message),
          field_(std::move(field)),
          message_(std::move(message)) {}
    const std::string& field() const { return field_; }
    const std::string& message() const { return message_; }

private:
    std::string field_;
    std::string message_;
};

struct ArrayConfig {
    // Level 1 (innermost) first in all four lists.
    std::vector<int> counts_tx;      // K_1..K_N
    std::vector<int> counts_rx;      // V_1..V_N
    std::vector<double> radii_tx;    // R_t1..R_tN, meters
    std::vector<double> radii_rx;    // R_r1..R_rN, meters

    double distance_m = 0.0;         // boresight separation D
    double carrier_hz = 0.0;
    double beta = 1.0;               // gain constant in the pair-gain law
    double total_power_w = 1.0;
    double noise_variance_w = 0.0;   // per receive branch (complex variance)

    int levels() const { return static_cast<int>(counts_tx.size()); }

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }

    bool symmetric_counts() const { return counts_tx == counts_rx; }
    bool symmetric_radii() const { return radii_tx == radii_rx; }

    double aggregate_radius(Side side) const {
        const auto& r = (side == Side::tx) ? radii_tx : radii_rx;
        return std::accumulate(r.begin(), r.end(), 0.0);
    }

    MixedRadix radix(Side side) const {
        return MixedRadix(side == Side::tx ? counts_tx : counts_rx);
    }

    // Symmetric mode (K_n = V_n, R_tn = R_rn) is the default throughout.
    static ArrayConfig symmetric(std::vector<int> counts, std::vector<double> radii,
                                 double distance_m, double carrier_hz,
                                 double beta = 1.0, double total_power_w = 1.0,
                                 double noise_variance_w = 0.0) {
        ArrayConfig c;
        c.counts_tx = counts;
        c.counts_rx = std::move(counts);
        c.radii_tx = radii;
        c.radii_rx = std::move(radii);
        c.distance_m = distance_m;
        c.carrier_hz = carrier_hz;
        c.beta = beta;
        c.total_power_w = total_power_w;
        c.noise_variance_w = noise_variance_w;
        return c;
    }

    void validate() const {
        auto check_side = [](const std::vector<int>& counts, const std::vector<double>& radii,
                             const std::string& cname, const std::string& rname) {
            if (counts.empty()) throw config_error(cname, "at least one level required");
            for (std::size_t i = 0; i < counts.size(); ++i)
                if (counts[i] < 1)
                    throw config_error(cname + "[" + std::to_string(i) + "]", "cell count must be >= 1");
            if (radii.size() != counts.size())
                throw config_error(rname, "needs one radius per level");
            for (std::size_t i = 0; i < radii.size(); ++i)
                if (!(radii[i] >= 0.0))
                    throw config_error(rname + "[" + std::to_string(i) + "]", "radius must be >= 0");
        };
        check_side(counts_tx, radii_tx, "counts_tx", "radii_tx");
        check_side(counts_rx, radii_rx, "counts_rx", "radii_rx");
        if (counts_tx.size() != counts_rx.size())
            throw config_error("counts_rx", "tx and rx must have the same number of levels");
        if (!(distance_m > 0.0)) throw config_error("distance_m", "must be > 0");
        if (!(carrier_hz > 0.0)) throw config_error("carrier_hz", "must be > 0");
        if (!(beta > 0.0)) throw config_error("beta", "must be > 0");
        if (!(total_power_w > 0.0)) throw config_error("total_power_w", "must be > 0");
        if (!(noise_variance_w >= 0.0)) throw config_error("noise_variance_w", "must be >= 0");
    }

    // The 1/d amplitude law is applied at any separation; flag configs that
    // sit inside twice the aggregate aperture so reports can carry a warning.
    bool near_field() const {
        return distance_m < 2.0 * std::max(aggregate_radius(Side::tx), aggregate_radius(Side::rx));
    }
};

}  // namespace qfuca
