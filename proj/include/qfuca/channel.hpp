// SPDX-License-Identifier: Apache-2.0
//
// Line-of-sight channel between the two arrays. Each logical pair gets the
// free-space gain beta*lambda/(4 pi d) * exp(-j 2 pi d / lambda). Two
// distance routes are provided: the exact Euclidean norm over the full 3D
// coordinates, and the literal second-order expansion in 1/D with its
// per-level (1 - cos) terms and four-cosine cross terms. The expansion
// assumes equal tx/rx radii per level, so asymmetric configs are rejected
// in approx mode. A circulant-residual diagnostic quantifies how close the
// assembled matrix is to the recursive circulant-block pattern that the
// DFT demodulation chain relies on.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "qfuca/config.hpp"
#include "qfuca/geometry.hpp"
#include "qfuca/indexing.hpp"

namespace qfuca {

enum class DistanceMode { exact, approx };

inline const char* distance_mode_name(DistanceMode m) {
    return m == DistanceMode::exact ? "exact" : "approx";
}

inline double exact_distance(const ArrayConfig& config, std::span<const int> tx_digits,
                             std::span<const int> rx_digits) {
    const Eigen::Vector3d t = element_position(config, tx_digits, Side::tx);
    const Eigen::Vector3d r = element_position(config, rx_digits, Side::rx);
    return (r - t).norm();
}

// Second-order expansion around the boresight separation D:
//   D + (1/D) sum_n R_n^2 (1 - cos(theta_n - phi_n))
//     + (1/D) sum_{i<j} R_i R_j [cos(theta_i - theta_j) + cos(phi_i - phi_j)
//                                + cos(theta_i - phi_j) + cos(phi_i - theta_j)]
// with theta from the rx digits and phi from the tx digits. The cross terms
// are evaluated term by term as displayed; see the tests for how they
// behave against the exact route.
inline double approx_distance(const ArrayConfig& config, std::span<const int> tx_digits,
                              std::span<const int> rx_digits) {
    if (!(config.distance_m > 0.0))
        throw std::invalid_argument("approx_distance: requires D > 0");
    if (!config.symmetric_radii())
        throw config_error("radii_rx", "approx distance mode assumes R_tn = R_rn per level");
    const MixedRadix tx_radix = config.radix(Side::tx);
    const MixedRadix rx_radix = config.radix(Side::rx);
    if (!tx_radix.valid(tx_digits) || !rx_radix.valid(rx_digits))
        throw std::out_of_range("approx_distance: digit out of range");

    const int levels = config.levels();
    std::vector<double> phi(static_cast<std::size_t>(levels)), theta(static_cast<std::size_t>(levels));
    for (int n = 0; n < levels; ++n) {
        phi[static_cast<std::size_t>(n)] =
            2.0 * std::numbers::pi * tx_digits[static_cast<std::size_t>(n)] / tx_radix.counts()[static_cast<std::size_t>(n)];
        theta[static_cast<std::size_t>(n)] =
            2.0 * std::numbers::pi * rx_digits[static_cast<std::size_t>(n)] / rx_radix.counts()[static_cast<std::size_t>(n)];
    }
    const std::vector<double>& radii = config.radii_tx;

    const double inv_d = 1.0 / config.distance_m;
    double d = config.distance_m;
    for (int n = 0; n < levels; ++n) {
        const auto un = static_cast<std::size_t>(n);
        d += inv_d * radii[un] * radii[un] * (1.0 - std::cos(theta[un] - phi[un]));
    }
    for (int i = 0; i < levels - 1; ++i)
        for (int j = i + 1; j < levels; ++j) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            const double cross = std::cos(theta[ui] - theta[uj]) + std::cos(phi[ui] - phi[uj]) +
                                 std::cos(theta[ui] - phi[uj]) + std::cos(phi[ui] - theta[uj]);
            d += inv_d * radii[ui] * radii[uj] * cross;
        }
    return d;
}

inline double pair_distance(const ArrayConfig& config, std::span<const int> tx_digits,
                            std::span<const int> rx_digits, DistanceMode mode) {
    return mode == DistanceMode::exact ? exact_distance(config, tx_digits, rx_digits)
                                       : approx_distance(config, tx_digits, rx_digits);
}

// Free-space complex gain for one element pair at separation d.
inline cxd pair_gain(const ArrayConfig& config, double d) {
    if (!(d > 0.0))
        throw std::domain_error("pair_gain: singular at d = 0 (co-located elements)");
    const double lambda = config.wavelength_m();
    const double amplitude = config.beta * lambda / (4.0 * std::numbers::pi * d);
    const double phase = -2.0 * std::numbers::pi * d / lambda;
    return std::polar(amplitude, phase);
}

struct ChannelMatrix {
    Eigen::MatrixXcd h;  // rows: rx logical index, cols: tx logical index
    DistanceMode mode = DistanceMode::exact;
    ArrayConfig config;
    bool near_field_warning = false;
};

inline ChannelMatrix assemble_channel(const ArrayConfig& config, DistanceMode mode) {
    config.validate();
    const MixedRadix tx_radix = config.radix(Side::tx);
    const MixedRadix rx_radix = config.radix(Side::rx);
    const auto n_tx = static_cast<Eigen::Index>(tx_radix.size());
    const auto n_rx = static_cast<Eigen::Index>(rx_radix.size());

    ChannelMatrix cm;
    cm.mode = mode;
    cm.config = config;
    cm.near_field_warning = config.near_field();
    cm.h.resize(n_rx, n_tx);
    for (Eigen::Index v = 0; v < n_rx; ++v) {
        const auto rx_digits = rx_radix.digits(static_cast<std::size_t>(v));
        for (Eigen::Index k = 0; k < n_tx; ++k) {
            const auto tx_digits = tx_radix.digits(static_cast<std::size_t>(k));
            cm.h(v, k) = pair_gain(config, pair_distance(config, tx_digits, rx_digits, mode));
        }
    }
    return cm;
}

// Distance of H from its best recursive-circulant projection (orbit average
// over the per-level index differences), relative to ||H||_F. Zero iff every
// entry depends on the digit tuple only through (v_n - k_n) mod K_n.
inline double circulant_residual(const Eigen::MatrixXcd& h, const MixedRadix& radix) {
    const auto m = static_cast<Eigen::Index>(radix.size());
    if (h.rows() != m || h.cols() != m)
        throw std::invalid_argument("circulant_residual: square symmetric-mode matrix required");
    const double norm = h.norm();
    if (norm == 0.0) return 0.0;

    const int levels = radix.levels();
    Eigen::VectorXcd orbit_sum = Eigen::VectorXcd::Zero(m);
    std::vector<int> diff(static_cast<std::size_t>(levels));
    auto orbit_of = [&](Eigen::Index v, Eigen::Index k) {
        const auto vd = radix.digits(static_cast<std::size_t>(v));
        const auto kd = radix.digits(static_cast<std::size_t>(k));
        for (int n = 0; n < levels; ++n) {
            const auto un = static_cast<std::size_t>(n);
            diff[un] = ((vd[un] - kd[un]) % radix.counts()[un] + radix.counts()[un]) % radix.counts()[un];
        }
        return static_cast<Eigen::Index>(radix.linear(diff));
    };

    for (Eigen::Index v = 0; v < m; ++v)
        for (Eigen::Index k = 0; k < m; ++k) orbit_sum(orbit_of(v, k)) += h(v, k);
    // every orbit has exactly m members
    const Eigen::VectorXcd orbit_mean = orbit_sum / static_cast<double>(m);

    double sq = 0.0;
    for (Eigen::Index v = 0; v < m; ++v)
        for (Eigen::Index k = 0; k < m; ++k) sq += std::norm(h(v, k) - orbit_mean(orbit_of(v, k)));
    return std::sqrt(sq) / norm;
}

inline double circulant_residual(const ChannelMatrix& cm) {
    if (!cm.config.symmetric_counts())
        throw config_error("counts_rx", "circulant residual requires K_n = V_n");
    return circulant_residual(cm.h, cm.config.radix(Side::tx));
}

}  // namespace qfuca
