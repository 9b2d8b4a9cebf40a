// SPDX-License-Identifier: Apache-2.0
//
// Config-driven front end: scenario files (JSON), execution of the
// geometry -> modulation -> channel -> demodulation -> metrics chain, and
// CSV emission. Runs are deterministic under a fixed seed, including the
// noise Monte-Carlo trials, so two runs of the same file produce
// byte-identical outputs.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qfuca/channel.hpp"
#include "qfuca/csv.hpp"
#include "qfuca/demodulation.hpp"
#include "qfuca/geometry.hpp"
#include "qfuca/metrics.hpp"
#include "qfuca/modulation.hpp"
#include "qfuca/presets.hpp"

namespace qfuca {

struct SweepSpec {
    std::vector<std::string> preset_ids;  // empty = just the scenario's own config
    std::vector<double> distances_m;      // empty = the scenario's distance
    std::vector<double> snr_dbs;          // empty = the scenario's snr
};

struct Scenario {
    std::string config_id = "custom";
    ArrayConfig config;
    DistanceMode distance_mode = DistanceMode::exact;
    double snr_db = 15.0;
    std::uint64_t seed = 1;
    int trials = 0;  // noise Monte-Carlo trials; 0 = analytic sigma2 only
    std::filesystem::path out_dir = "out";
    double merge_tol_m = -1.0;  // < 0 = default wavelength/100
    bool dump_channel = false;
    bool dump_modulation = false;
    bool dump_leakage = false;
    std::optional<SweepSpec> sweep;

    double merge_tol() const {
        return merge_tol_m >= 0.0 ? merge_tol_m : config.wavelength_m() / 100.0;
    }
};

namespace detail {

using nlohmann::json;

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path, "number required");
    return j.get<double>();
}

inline std::vector<int> as_int_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw config_error(path, "nonempty array required");
    std::vector<int> out;
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw config_error(path, "integer entries required");
        out.push_back(e.get<int>());
    }
    return out;
}

inline std::vector<double> as_double_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw config_error(path, "nonempty array required");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw config_error(path, "numeric entries required");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using nlohmann::json;
    if (!j.is_object()) throw config_error("file", "top-level JSON object required");

    Scenario s;
    bool have_structure = false;

    if (j.contains("preset")) {
        if (!j["preset"].is_string()) throw config_error("preset", "string required");
        const Preset& p = preset(j["preset"].get<std::string>());
        s.config = p.config;
        s.config_id = p.id;
        have_structure = true;
    }

    bool explicit_noise = false;
    bool explicit_snr = false;
    if (j.contains("config")) {
        const json& c = j["config"];
        if (!c.is_object()) throw config_error("config", "object required");

        if (c.contains("counts")) {
            s.config.counts_tx = detail::as_int_list(c["counts"], "config.counts");
            s.config.counts_rx = s.config.counts_tx;
            have_structure = true;
        }
        if (c.contains("counts_tx"))
            s.config.counts_tx = detail::as_int_list(c["counts_tx"], "config.counts_tx");
        if (c.contains("counts_rx"))
            s.config.counts_rx = detail::as_int_list(c["counts_rx"], "config.counts_rx");
        if (c.contains("radii_m")) {
            s.config.radii_tx = detail::as_double_list(c["radii_m"], "config.radii_m");
            s.config.radii_rx = s.config.radii_tx;
        }
        if (c.contains("radii_tx_m"))
            s.config.radii_tx = detail::as_double_list(c["radii_tx_m"], "config.radii_tx_m");
        if (c.contains("radii_rx_m"))
            s.config.radii_rx = detail::as_double_list(c["radii_rx_m"], "config.radii_rx_m");
        if (c.contains("distance_m")) s.config.distance_m = detail::as_number(c["distance_m"], "config.distance_m");
        if (c.contains("carrier_hz")) s.config.carrier_hz = detail::as_number(c["carrier_hz"], "config.carrier_hz");
        if (c.contains("beta")) s.config.beta = detail::as_number(c["beta"], "config.beta");
        if (c.contains("total_power_w"))
            s.config.total_power_w = detail::as_number(c["total_power_w"], "config.total_power_w");
        if (c.contains("noise_variance_w")) {
            s.config.noise_variance_w = detail::as_number(c["noise_variance_w"], "config.noise_variance_w");
            explicit_noise = true;
        }
        if (c.contains("snr_db")) {
            s.snr_db = detail::as_number(c["snr_db"], "config.snr_db");
            explicit_snr = true;
        }
        if (explicit_noise && explicit_snr)
            throw config_error("config.snr_db", "give either snr_db or noise_variance_w, not both");
        if (j.contains("preset") && (c.contains("counts_tx") || c.contains("counts_rx")))
            have_structure = true;
    }

    if (!have_structure) throw config_error("config.counts", "required (or set a preset)");
    if (!j.contains("preset")) {
        if (s.config.radii_tx.empty()) throw config_error("config.radii_m", "required");
        if (!(s.config.distance_m > 0.0)) throw config_error("config.distance_m", "required and > 0");
        if (!(s.config.carrier_hz > 0.0)) throw config_error("config.carrier_hz", "required and > 0");
    }

    // SNR knob: total transmit power over per-branch noise variance.
    if (explicit_noise) {
        if (!(s.config.noise_variance_w > 0.0))
            throw config_error("config.noise_variance_w", "must be > 0");
        s.snr_db = 10.0 * std::log10(s.config.total_power_w / s.config.noise_variance_w);
    } else {
        s.config.noise_variance_w = s.config.total_power_w * std::pow(10.0, -s.snr_db / 10.0);
    }

    if (j.contains("distance_mode")) {
        if (!j["distance_mode"].is_string())
            throw config_error("distance_mode", "string 'exact' or 'approx' required");
        const std::string m = j["distance_mode"].get<std::string>();
        if (m == "exact") s.distance_mode = DistanceMode::exact;
        else if (m == "approx") s.distance_mode = DistanceMode::approx;
        else throw config_error("distance_mode", "must be 'exact' or 'approx'");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw config_error("seed", "unsigned integer required");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials")) {
        if (!j["trials"].is_number_integer() || j["trials"].get<int>() < 0)
            throw config_error("trials", "integer >= 0 required");
        s.trials = j["trials"].get<int>();
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw config_error("out_dir", "string required");
        s.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("merge_tol_m")) {
        s.merge_tol_m = detail::as_number(j["merge_tol_m"], "merge_tol_m");
        if (s.merge_tol_m < 0.0) throw config_error("merge_tol_m", "must be >= 0");
    }
    if (j.contains("dump_channel")) {
        if (!j["dump_channel"].is_boolean()) throw config_error("dump_channel", "boolean required");
        s.dump_channel = j["dump_channel"].get<bool>();
    }
    if (j.contains("dump_modulation")) {
        if (!j["dump_modulation"].is_boolean())
            throw config_error("dump_modulation", "boolean required");
        s.dump_modulation = j["dump_modulation"].get<bool>();
    }
    if (j.contains("dump_leakage")) {
        if (!j["dump_leakage"].is_boolean()) throw config_error("dump_leakage", "boolean required");
        s.dump_leakage = j["dump_leakage"].get<bool>();
    }
    if (j.contains("sweep")) {
        const nlohmann::json& w = j["sweep"];
        if (!w.is_object()) throw config_error("sweep", "object required");
        SweepSpec spec;
        if (w.contains("presets")) {
            if (!w["presets"].is_array() || w["presets"].empty())
                throw config_error("sweep.presets", "nonempty array required");
            for (const auto& e : w["presets"]) {
                if (!e.is_string()) throw config_error("sweep.presets", "string entries required");
                spec.preset_ids.push_back(e.get<std::string>());
            }
        }
        if (w.contains("distance_m"))
            spec.distances_m = detail::as_double_list(w["distance_m"], "sweep.distance_m");
        if (w.contains("snr_db")) spec.snr_dbs = detail::as_double_list(w["snr_db"], "sweep.snr_db");
        s.sweep = spec;
    }

    try {
        s.config.validate();
    } catch (const config_error& e) {
        throw config_error("config." + e.field(), e.message());
    }
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw config_error("file", "cannot open scenario file " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("file", std::string("JSON parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

namespace detail {

inline std::vector<std::string> digit_headers(const MixedRadix& radix, char symbol) {
    std::vector<std::string> h;
    for (int n = 1; n <= radix.levels(); ++n) h.push_back(std::string(1, symbol) + std::to_string(n));
    return h;
}

inline void write_layout_csv(const std::filesystem::path& path, const ElementLayout& layout) {
    std::vector<std::string> header = digit_headers(layout.radix, layout.side == Side::tx ? 'k' : 'v');
    header.insert(header.end(), {"x_m", "y_m", "z_m", "physical_id"});
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < layout.logical_count(); ++i) {
        const auto digits = layout.radix.digits(i);
        std::vector<std::string> cells;
        for (int d : digits) cells.push_back(csv_num(d));
        const Eigen::Vector3d& p = layout.logical_positions[i];
        cells.push_back(csv_num(p.x()));
        cells.push_back(csv_num(p.y()));
        cells.push_back(csv_num(p.z()));
        cells.push_back(csv_num(layout.logical_to_physical[i]));
        w.row(cells);
    }
}

inline std::vector<std::string> se_header() {
    return {"config_id",        "levels",          "logical_streams", "physical_elements",
            "distance_m",       "snr_db",          "total_se_bits_per_s_per_hz",
            "active_modes",     "circulant_residual", "block_residual",
            "max_sym_residual", "near_field_warning"};
}

inline std::vector<std::string> se_comments() {
    return {"snr_db = 10*log10(total transmit power / per-branch noise variance)",
            "per-mode SE noise: post-processing variance referred through the mode singular value",
            "circulant_residual = -1 when K_n != V_n (undefined for rectangular channels)"};
}

inline std::vector<std::string> se_row_cells(const ComparisonRow& r) {
    return {r.config_id,
            csv_num(r.levels),
            csv_num(r.logical_streams),
            csv_num(r.physical_elements),
            csv_num(r.distance_m),
            csv_num(r.snr_db),
            csv_num(r.total_se),
            csv_num(r.active_modes),
            csv_num(r.circulant_residual),
            csv_num(r.block_residual),
            csv_num(r.max_sym_residual),
            csv_num(static_cast<int>(r.near_field))};
}

inline void append_matrix_rows(CsvWriter& w, const std::string& name, const Eigen::MatrixXcd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            w.row({name, csv_num(static_cast<std::size_t>(r)), csv_num(static_cast<std::size_t>(c)),
                   csv_num(m(r, c).real()), csv_num(m(r, c).imag())});
}

// Seeded frame of unit-phase symbols carrying the uniform power split.
inline Eigen::VectorXcd make_symbols(const PowerAllocation& alloc, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(alloc.per_mode.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double th = phase(rng);  // one draw per mode keeps frames comparable across masks
        if (alloc.per_mode(i) > 0.0) s(i) = std::polar(std::sqrt(alloc.per_mode(i)), th);
    }
    return s;
}

inline Eigen::VectorXcd draw_noise(double variance, Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cxd(g(rng), g(rng));
    return v;
}

}  // namespace detail

inline void print_presets(std::ostream& os) {
    os << "Shipped presets (layouts are documented reconstructions, not ground truth):\n";
    for (const Preset& p : presets()) {
        const ElementLayout layout = build_layout(p.config, Side::tx, p.config.wavelength_m() / 100.0);
        os << "  " << p.id << ": " << p.description << "\n    counts =";
        for (int k : p.config.counts_tx) os << ' ' << k;
        os << ", radii_m =";
        for (double r : p.config.radii_tx) os << ' ' << csv_num(r);
        os << ", R_E = " << csv_num(p.config.aggregate_radius(Side::tx)) << " m"
           << ", logical = " << layout.logical_count() << ", physical = " << layout.physical_count()
           << ", D = " << csv_num(p.config.distance_m) << " m, carrier = "
           << csv_num(p.config.carrier_hz) << " Hz\n";
    }
}

inline ComparisonRow make_se_row(const Scenario& s, const ChannelMatrix& channel,
                                 const DemodPipeline& pl, const SeResult& se) {
    ComparisonRow row;
    row.config_id = s.config_id;
    row.levels = s.config.levels();
    const ElementLayout layout = build_layout(s.config, Side::tx, s.merge_tol());
    row.logical_streams = layout.logical_count();
    row.physical_elements = layout.physical_count();
    row.distance_m = s.config.distance_m;
    row.snr_db = s.snr_db;
    row.total_se = se.total_se;
    row.active_modes = se.active_modes;
    row.circulant_residual = s.config.symmetric_counts() ? circulant_residual(channel) : -1.0;
    row.block_residual = pl.block_residual;
    row.max_sym_residual = pl.max_sym_residual();
    row.near_field = channel.near_field_warning;
    return row;
}

// Full single-point run: layout, channel, calibrated chain, one demodulated
// frame, SE table. Writes layout_tx.csv, layout_rx.csv, channel_summary.csv,
// demod_report.csv, se_table.csv (and channel.csv when dump_channel is set).
inline void run_scenario(const Scenario& s) {
    namespace fs = std::filesystem;
    s.config.validate();
    fs::create_directories(s.out_dir);

    const ElementLayout tx_layout = build_layout(s.config, Side::tx, s.merge_tol());
    const ElementLayout rx_layout = build_layout(s.config, Side::rx, s.merge_tol());
    detail::write_layout_csv(s.out_dir / "layout_tx.csv", tx_layout);
    detail::write_layout_csv(s.out_dir / "layout_rx.csv", rx_layout);

    const ChannelMatrix channel = assemble_channel(s.config, s.distance_mode);
    {
        double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
        const MixedRadix txr = s.config.radix(Side::tx), rxr = s.config.radix(Side::rx);
        for (std::size_t v = 0; v < rxr.size(); ++v)
            for (std::size_t k = 0; k < txr.size(); ++k) {
                const double d =
                    pair_distance(s.config, txr.digits(k), rxr.digits(v), s.distance_mode);
                dmin = std::min(dmin, d);
                dmax = std::max(dmax, d);
            }
        CsvWriter w(s.out_dir / "channel_summary.csv",
                    {"distance_mode", "rx_count", "tx_count", "min_abs_gain", "max_abs_gain",
                     "min_distance_m", "max_distance_m", "circulant_residual",
                     "near_field_warning"});
        w.row({distance_mode_name(s.distance_mode), csv_num(static_cast<std::size_t>(channel.h.rows())),
               csv_num(static_cast<std::size_t>(channel.h.cols())),
               csv_num(channel.h.cwiseAbs().minCoeff()), csv_num(channel.h.cwiseAbs().maxCoeff()),
               csv_num(dmin), csv_num(dmax),
               csv_num(s.config.symmetric_counts() ? circulant_residual(channel) : -1.0),
               csv_num(static_cast<int>(channel.near_field_warning))});
    }
    if (s.dump_channel) {
        CsvWriter w(s.out_dir / "channel.csv", {"rx_index", "tx_index", "re", "im", "distance_m"});
        const MixedRadix txr = s.config.radix(Side::tx), rxr = s.config.radix(Side::rx);
        for (std::size_t v = 0; v < rxr.size(); ++v)
            for (std::size_t k = 0; k < txr.size(); ++k) {
                const double d =
                    pair_distance(s.config, txr.digits(k), rxr.digits(v), s.distance_mode);
                w.row({csv_num(v), csv_num(k),
                       csv_num(channel.h(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k)).real()),
                       csv_num(channel.h(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k)).imag()),
                       csv_num(d)});
            }
    }

    const DemodPipeline pl = calibrate_pipeline(channel);
    if (s.dump_modulation) {
        CsvWriter w(s.out_dir / "modulation_matrices.csv", {"matrix", "row", "col", "re", "im"},
                    {"raw (unnormalized) forms; the transmit map applies 1/sqrt(prod K) once"});
        detail::append_matrix_rows(w, "W_top", pl.mset.top_idft);
        detail::append_matrix_rows(w, "Lambda_top", pl.mset.lambda_top);
        detail::append_matrix_rows(w, "W_nested", pl.mset.tx_raw);
    }
    const double noise_var = s.config.noise_variance_w;
    const PowerAllocation alloc = PowerAllocation::uniform(s.config.total_power_w, pl.recoverable);

    std::mt19937_64 rng(s.seed);
    const Eigen::VectorXcd symbols = detail::make_symbols(alloc, rng);
    const DemodReport report = recursive_demodulate(pl, symbols, nullptr, noise_var);

    Eigen::VectorXd mc_sigma2;
    if (s.trials > 0) {
        mc_sigma2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pl.mode_count()));
        for (int t = 0; t < s.trials; ++t) {
            const Eigen::VectorXcd n =
                detail::draw_noise(noise_var, static_cast<Eigen::Index>(pl.mode_count()), rng);
            mc_sigma2 += (pl.demod_full * n).cwiseAbs2();
        }
        mc_sigma2 /= static_cast<double>(s.trials);
    }

    {
        std::vector<std::string> header = detail::digit_headers(pl.radix, 'l');
        header.insert(header.end(), {"v", "sigma2_w", "leakage", "recovered_error"});
        if (s.trials > 0) header.push_back("mc_sigma2_w");
        CsvWriter w(s.out_dir / "demod_report.csv", header,
                    {"sigma2_w: noise_var * ||composite demodulation row||^2 (post-processing)",
                     "unrecoverable modes (singular value below threshold) get zero inverted gain"});
        for (std::size_t m = 0; m < pl.mode_count(); ++m) {
            std::vector<std::string> cells;
            for (int d : pl.radix.digits(m)) cells.push_back(csv_num(d));
            const auto i = static_cast<Eigen::Index>(m);
            cells.push_back(csv_num(report.mode_gain(i)));
            cells.push_back(csv_num(report.sigma2(i)));
            cells.push_back(csv_num(report.leakage(i)));
            cells.push_back(csv_num(report.recovered_error(i)));
            if (s.trials > 0) cells.push_back(csv_num(mc_sigma2(i)));
            w.row(cells);
        }
    }

    if (s.dump_leakage) {
        std::vector<std::string> header;
        for (int n = 1; n <= pl.radix.levels(); ++n) header.push_back("in_l" + std::to_string(n));
        for (int n = 1; n <= pl.radix.levels(); ++n) header.push_back("out_l" + std::to_string(n));
        header.push_back("power");
        CsvWriter w(s.out_dir / "leakage.csv", header,
                    {"|end-to-end response|^2 from injected mode (in) to recovered mode (out)"});
        const Eigen::MatrixXd leak = leakage_matrix(pl);
        for (std::size_t in = 0; in < pl.mode_count(); ++in)
            for (std::size_t out = 0; out < pl.mode_count(); ++out) {
                std::vector<std::string> cells;
                for (int d : pl.radix.digits(in)) cells.push_back(csv_num(d));
                for (int d : pl.radix.digits(out)) cells.push_back(csv_num(d));
                cells.push_back(csv_num(leak(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in))));
                w.row(cells);
            }
    }

    const SeResult se = pipeline_spectrum_efficiency(pl, s.config.total_power_w, noise_var);
    {
        CsvWriter w(s.out_dir / "se_table.csv", detail::se_header(), detail::se_comments());
        w.row(detail::se_row_cells(make_se_row(s, channel, pl, se)));
    }

    std::cout << s.config_id << ": " << pl.mode_count() << " modes (" << se.active_modes
              << " active), SE = " << csv_num(se.total_se) << " bits/s/Hz at snr_db = "
              << csv_num(s.snr_db) << ", block residual " << csv_num(pl.block_residual) << "\n";
}

// Residuals and conditioning only; no symbol transmission.
inline void run_diagnose(const Scenario& s) {
    namespace fs = std::filesystem;
    s.config.validate();
    fs::create_directories(s.out_dir);

    const ChannelMatrix channel = assemble_channel(s.config, s.distance_mode);
    const DemodPipeline pl = calibrate_pipeline(channel);
    const double circ = s.config.symmetric_counts() ? circulant_residual(channel) : -1.0;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pl.effective);
    const Eigen::VectorXd sv = svd.singularValues();
    const double sv_max = sv.size() ? sv(0) : 0.0;
    double sv_min = sv_max;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-14 * sv_max) sv_min = sv(i);
    const double cond = sv_min > 0.0 ? sv_max / sv_min : std::numeric_limits<double>::infinity();

    double gap = -1.0;  // exact-vs-approx distance disagreement, when defined
    if (s.config.symmetric_radii()) {
        gap = 0.0;
        const MixedRadix txr = s.config.radix(Side::tx), rxr = s.config.radix(Side::rx);
        for (std::size_t v = 0; v < rxr.size(); ++v)
            for (std::size_t k = 0; k < txr.size(); ++k) {
                const auto td = txr.digits(k), rd = rxr.digits(v);
                gap = std::max(gap, std::abs(approx_distance(s.config, td, rd) -
                                             exact_distance(s.config, td, rd)));
            }
    }

    CsvWriter w(s.out_dir / "diagnostics.csv",
                {"config_id", "levels", "distance_mode", "circulant_residual", "block_residual",
                 "max_sym_residual", "effective_condition_number", "max_exact_approx_gap_m",
                 "active_modes", "near_field_warning"},
                {"max_exact_approx_gap_m = -1 when the expansion is undefined (asymmetric radii)"});
    w.row({s.config_id, csv_num(s.config.levels()), distance_mode_name(s.distance_mode),
           csv_num(circ), csv_num(pl.block_residual), csv_num(pl.max_sym_residual()), csv_num(cond),
           csv_num(gap), csv_num(pl.active_mode_count()),
           csv_num(static_cast<int>(channel.near_field_warning))});

    std::cout << s.config_id << ": circulant residual " << csv_num(circ) << ", block residual "
              << csv_num(pl.block_residual) << ", max sym residual " << csv_num(pl.max_sym_residual())
              << ", cond " << csv_num(cond) << ", exact-approx gap " << csv_num(gap) << " m\n";
}

inline void run_layout(const Scenario& s) {
    namespace fs = std::filesystem;
    s.config.validate();
    fs::create_directories(s.out_dir);
    const ElementLayout tx_layout = build_layout(s.config, Side::tx, s.merge_tol());
    const ElementLayout rx_layout = build_layout(s.config, Side::rx, s.merge_tol());
    detail::write_layout_csv(s.out_dir / "layout_tx.csv", tx_layout);
    detail::write_layout_csv(s.out_dir / "layout_rx.csv", rx_layout);
    const LayoutSummary sum = layout_summary(tx_layout, s.config);
    std::cout << s.config_id << ": " << sum.logical_streams << " logical streams on "
              << sum.physical_elements << " physical elements (sharing: "
              << (sum.more_streams_than_elements ? "yes" : "no") << "), R_E = "
              << csv_num(sum.aggregate_radius_m) << " m\n";
}

// Grid execution over presets x distance x snr; canonical row order.
inline void run_sweep(const Scenario& s) {
    namespace fs = std::filesystem;
    fs::create_directories(s.out_dir);

    std::vector<NamedConfig> entries;
    std::vector<double> distances{s.config.distance_m};
    std::vector<double> snrs{s.snr_db};
    if (s.sweep) {
        if (!s.sweep->preset_ids.empty()) {
            entries.clear();
            for (const std::string& id : s.sweep->preset_ids) {
                ArrayConfig c = preset(id).config;
                c.total_power_w = s.config.total_power_w;
                entries.push_back({id, c});
            }
        }
        if (!s.sweep->distances_m.empty()) distances = s.sweep->distances_m;
        if (!s.sweep->snr_dbs.empty()) snrs = s.sweep->snr_dbs;
    }
    if (entries.empty()) entries.push_back({s.config_id, s.config});

    const std::vector<ComparisonRow> rows =
        dimension_comparison(entries, snrs, distances, s.distance_mode);
    CsvWriter w(s.out_dir / "se_table.csv", detail::se_header(), detail::se_comments());
    for (const ComparisonRow& r : rows) w.row(detail::se_row_cells(r));
    std::cout << "sweep: " << rows.size() << " rows -> " << (s.out_dir / "se_table.csv").string()
              << "\n";
}

}  // namespace qfuca
