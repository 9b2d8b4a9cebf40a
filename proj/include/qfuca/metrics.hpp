// SPDX-License-Identifier: Apache-2.0
//
// Spectrum efficiency and orthogonality diagnostics on top of a calibrated
// pipeline. Per-mode SE follows log2(1 + v^2 p / sigma^2); the default
// per-mode noise is the post-processing variance referred to the mode's
// decision point through its singular value, so the SINR equals the one
// actually realized on the recovered symbol. The SNR knob of sweeps is
// total transmit power over per-branch noise variance (stated in every CSV
// header since reference points differ across the literature).

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <future>
#include <numbers>
#include <string>
#include <vector>

#include "qfuca/channel.hpp"
#include "qfuca/demodulation.hpp"
#include "qfuca/geometry.hpp"

namespace qfuca {

struct PowerAllocation {
    Eigen::VectorXd per_mode;  // watts
    double total_power = 0.0;

    // Uniform split over the active modes; inactive modes get zero.
    static PowerAllocation uniform(double total_power, const std::vector<bool>& active) {
        std::size_t n_active = 0;
        for (bool b : active) n_active += b ? 1 : 0;
        if (n_active == 0)
            throw std::domain_error("PowerAllocation: no recoverable modes to allocate power to");
        PowerAllocation a;
        a.total_power = total_power;
        a.per_mode = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(active.size()));
        const double p = total_power / static_cast<double>(n_active);
        for (std::size_t i = 0; i < active.size(); ++i)
            if (active[i]) a.per_mode(static_cast<Eigen::Index>(i)) = p;
        return a;
    }
};

struct SeResult {
    Eigen::VectorXd sinr;      // per mode, linear
    Eigen::VectorXd se;        // per mode, bits/s/Hz
    double total_se = 0.0;     // bits/s/Hz
    std::size_t active_modes = 0;
};

// SE = sum over active modes of log2(1 + v^2 p / sigma^2). Inactive modes
// contribute zero but stay in the mode count.
inline SeResult spectrum_efficiency(const Eigen::VectorXd& gains, const PowerAllocation& alloc,
                                    const Eigen::VectorXd& noise_var,
                                    const std::vector<bool>& active) {
    const Eigen::Index m = gains.size();
    if (alloc.per_mode.size() != m || noise_var.size() != m ||
        static_cast<Eigen::Index>(active.size()) != m)
        throw std::invalid_argument("spectrum_efficiency: per-mode maps must share a domain");

    SeResult r;
    r.sinr = Eigen::VectorXd::Zero(m);
    r.se = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        if (!(noise_var(i) > 0.0))
            throw std::invalid_argument("spectrum_efficiency: noise variance must be > 0 for active modes");
        r.sinr(i) = gains(i) * gains(i) * alloc.per_mode(i) / noise_var(i);
        r.se(i) = std::log1p(r.sinr(i)) / std::numbers::ln2;
        ++r.active_modes;
    }
    r.total_se = r.se.sum();
    return r;
}

// Per-mode noise variance for the SE formula: the post-processing variance
// of the recovered symbol referred back through the mode's singular value,
// sigma_m^2 = v_m^2 * noise_var * ||t_m||^2. With an ideal unitary chain this
// collapses to the per-branch noise_var.
inline Eigen::VectorXd mode_noise_for_se(const DemodPipeline& pl, double noise_var) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pl.mode_gain.size());
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (pl.recoverable[static_cast<std::size_t>(i)])
            out(i) = pl.mode_gain(i) * pl.mode_gain(i) * noise_var * pl.row_norm_sq(i);
    return out;
}

inline SeResult pipeline_spectrum_efficiency(const DemodPipeline& pl, double total_power,
                                             double noise_var) {
    const PowerAllocation alloc = PowerAllocation::uniform(total_power, pl.recoverable);
    return spectrum_efficiency(pl.mode_gain, alloc, mode_noise_for_se(pl, noise_var),
                               pl.recoverable);
}

// |end-to-end response|^2 from injected mode (column) to recovered mode
// (row) for an arbitrary channel through the calibrated operators.
inline Eigen::MatrixXd leakage_matrix(const DemodPipeline& pl, const Eigen::MatrixXcd& h) {
    if (h.rows() != pl.demod_full.cols() || h.cols() != pl.tx.rows())
        throw std::invalid_argument("leakage_matrix: channel order mismatch");
    const Eigen::MatrixXcd g = pl.demod_full * h * pl.tx;
    return g.cwiseAbs2();
}

inline Eigen::MatrixXd leakage_matrix(const DemodPipeline& pl) {
    return pl.end_to_end.cwiseAbs2();
}

struct ComparisonRow {
    std::string config_id;
    int levels = 0;
    std::size_t logical_streams = 0;
    std::size_t physical_elements = 0;
    double distance_m = 0.0;
    double snr_db = 0.0;
    double total_se = 0.0;
    std::size_t active_modes = 0;
    double circulant_residual = 0.0;
    double block_residual = 0.0;
    double max_sym_residual = 0.0;
    bool near_field = false;
};

struct NamedConfig {
    std::string id;
    ArrayConfig config;
};

// Runs the full chain for every (config, distance, snr) grid point. The
// configs are expected to share the physical element budget and aggregate
// radius so the comparison is apples to apples; a mismatch is rejected.
// Points are evaluated concurrently and emitted in canonical grid order.
inline std::vector<ComparisonRow> dimension_comparison(const std::vector<NamedConfig>& configs,
                                                       const std::vector<double>& snr_dbs,
                                                       const std::vector<double>& distances_m,
                                                       DistanceMode mode) {
    if (configs.empty() || snr_dbs.empty() || distances_m.empty())
        throw std::invalid_argument("dimension_comparison: empty grid");

    std::size_t budget = 0;
    double radius = 0.0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const ArrayConfig& c = configs[i].config;
        c.validate();
        const double tol = c.wavelength_m() / 100.0;
        const ElementLayout layout = build_layout(c, Side::tx, tol);
        if (i == 0) {
            budget = layout.physical_count();
            radius = c.aggregate_radius(Side::tx);
        } else if (layout.physical_count() != budget ||
                   std::abs(c.aggregate_radius(Side::tx) - radius) > 1e-9) {
            throw config_error("configs[" + std::to_string(i) + "]",
                               "physical element budget / aggregate radius differs from configs[0]");
        }
    }

    struct Point {
        std::size_t config_idx;
        double distance;
    };
    std::vector<Point> points;
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
        for (double d : distances_m) points.push_back({ci, d});

    std::vector<std::future<std::vector<ComparisonRow>>> futures;
    futures.reserve(points.size());
    for (const Point& pt : points) {
        futures.push_back(std::async(std::launch::async, [&configs, &snr_dbs, mode, pt]() {
            ArrayConfig cfg = configs[pt.config_idx].config;
            cfg.distance_m = pt.distance;
            const ChannelMatrix ch = assemble_channel(cfg, mode);
            const DemodPipeline pl = calibrate_pipeline(ch);
            const double circ = circulant_residual(ch);
            const ElementLayout layout = build_layout(cfg, Side::tx, cfg.wavelength_m() / 100.0);

            std::vector<ComparisonRow> rows;
            for (double snr : snr_dbs) {
                const double noise_var = cfg.total_power_w * std::pow(10.0, -snr / 10.0);
                const SeResult se = pipeline_spectrum_efficiency(pl, cfg.total_power_w, noise_var);
                ComparisonRow row;
                row.config_id = configs[pt.config_idx].id;
                row.levels = cfg.levels();
                row.logical_streams = layout.logical_count();
                row.physical_elements = layout.physical_count();
                row.distance_m = pt.distance;
                row.snr_db = snr;
                row.total_se = se.total_se;
                row.active_modes = se.active_modes;
                row.circulant_residual = circ;
                row.block_residual = pl.block_residual;
                row.max_sym_residual = pl.max_sym_residual();
                row.near_field = ch.near_field_warning;
                rows.push_back(row);
            }
            return rows;
        }));
    }

    std::vector<ComparisonRow> out;
    for (auto& f : futures) {
        auto rows = f.get();
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

}  // namespace qfuca
