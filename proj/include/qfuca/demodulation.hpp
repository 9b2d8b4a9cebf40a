// SPDX-License-Identifier: Apache-2.0
//
// Receive-side chain. The top level is diagonalized into blocks by the
// matched DFT; each diagonal block is taken to the mode domain, phase-shift
// symmetrized, and factored by an SVD whose right factor feeds back into
// the transmitter as that block's precoder. Recovery then runs: top DFT,
// per-block decode (U^H P W^H), zero forcing by the stored singular values,
// and the plain lower-level DFT inverses. Everything is calibrated once
// from the noiseless channel (perfect CSI on the deterministic LOS link)
// and kept as explicit composite operators so noise rows and leakage are
// directly inspectable.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qfuca/channel.hpp"
#include "qfuca/config.hpp"
#include "qfuca/indexing.hpp"
#include "qfuca/modulation.hpp"

namespace qfuca {

struct SymmetrizeResult {
    Eigen::VectorXcd phases;      // diagonal of P, unit modulus
    Eigen::MatrixXcd symmetrized; // P * A
    double residual = 0.0;        // ||PA - (PA)^T||_F / ||PA||_F
};

// Per-row phase choice making P*A as symmetric as the phases allow. Init is
// the half-angle of the aggregate row/column mismatch, refined by
// coordinate descent on ||PA - (PA)^T||_F^2 (each update is the exact
// single-row minimizer, so the objective is monotone).
inline SymmetrizeResult phase_shift_symmetrize(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("phase_shift_symmetrize: square matrix required");
    const Eigen::Index n = a.rows();
    Eigen::VectorXcd p = Eigen::VectorXcd::Ones(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        cxd c(0.0, 0.0);
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) c += a(i, j) * std::conj(a(j, i));
        if (std::abs(c) > 0.0) p(i) = std::polar(1.0, -std::arg(c) / 2.0);
    }
    for (int iter = 0; iter < 200; ++iter) {
        double delta = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            cxd w(0.0, 0.0);
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) w += a(i, j) * std::conj(p(j) * a(j, i));
            const double mag = std::abs(w);
            if (mag > 0.0) {
                const cxd pn = std::conj(w) / mag;
                delta = std::max(delta, std::abs(pn - p(i)));
                p(i) = pn;
            }
        }
        if (delta < 1e-15) break;
    }

    SymmetrizeResult r;
    r.phases = p;
    r.symmetrized = p.asDiagonal() * a;
    const double norm = r.symmetrized.norm();
    r.residual = norm > 0.0 ? (r.symmetrized - r.symmetrized.transpose()).norm() / norm : 0.0;
    return r;
}

struct SvdFactor {
    Eigen::MatrixXcd u;               // decode factor
    Eigen::VectorXd singular_values;  // nonnegative, descending
    Eigen::MatrixXcd q;               // precode factor; input = u * diag(sv) * q^H
};

// SVD with a fixed phase convention: the first significant component of
// each left singular vector is made real positive (the matching right
// vector is rotated along, leaving the product unchanged).
inline SvdFactor factor_symmetric(const Eigen::MatrixXcd& s_sym) {
    if (s_sym.rows() != s_sym.cols())
        throw std::invalid_argument("factor_symmetric: square matrix required");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s_sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdFactor f;
    f.u = svd.matrixU();
    f.q = svd.matrixV();
    f.singular_values = svd.singularValues();
    for (Eigen::Index c = 0; c < f.u.cols(); ++c) {
        for (Eigen::Index r = 0; r < f.u.rows(); ++r) {
            const double mag = std::abs(f.u(r, c));
            if (mag > 1e-12) {
                const cxd ph = std::conj(f.u(r, c) / mag);
                f.u.col(c) *= ph;
                f.q.col(c) *= ph;
                break;
            }
        }
    }
    return f;
}

struct BlockDiagResult {
    Eigen::MatrixXcd transformed;          // W_N^H H W_N / K_N
    std::vector<Eigen::MatrixXcd> blocks;  // its diagonal blocks
    double residual = 0.0;                 // discarded off-diagonal energy, relative
};

// Unitary similarity transform by the normalized top-level DFT. Exactly
// block-diagonal iff H is circulant at the top level; the residual reports
// the relative Frobenius norm of whatever is discarded.
inline BlockDiagResult block_diagonalize(const Eigen::MatrixXcd& h, const ModulationSet& mset) {
    const MixedRadix radix(mset.counts);
    const auto m = static_cast<Eigen::Index>(radix.size());
    if (h.rows() != m || h.cols() != m)
        throw std::invalid_argument("block_diagonalize: channel order mismatch");
    const int top = radix.counts().back();
    const Eigen::Index block = m / top;

    BlockDiagResult r;
    r.transformed = (mset.top_idft.adjoint() * h * mset.top_idft) / static_cast<double>(top);
    r.blocks.reserve(static_cast<std::size_t>(top));
    Eigen::MatrixXcd off = r.transformed;
    for (int l = 0; l < top; ++l) {
        r.blocks.push_back(r.transformed.block(l * block, l * block, block, block));
        off.block(l * block, l * block, block, block).setZero();
    }
    const double total_sq = r.transformed.squaredNorm();
    r.residual = total_sq > 0.0 ? std::sqrt(off.squaredNorm() / total_sq) : 0.0;
    return r;
}

struct DemodPipeline {
    ArrayConfig config;
    DistanceMode distance_mode = DistanceMode::exact;
    MixedRadix radix;
    ModulationSet mset;            // carries the calibrated per-block precoders

    Eigen::MatrixXcd tx;           // unitary transmit composite
    Eigen::MatrixXcd effective;    // H * tx
    Eigen::MatrixXcd demod_pre;    // decode up to (not including) zero forcing; unitary
    Eigen::MatrixXcd demod_full;   // full recovery operator including regularized ZF
    Eigen::MatrixXcd end_to_end;   // demod_full * effective (identity in the ideal case)

    std::vector<Eigen::MatrixXcd> equivalent_blocks;  // diagonal blocks of W_N^H H W_N / K_N
    Eigen::VectorXd mode_gain;     // v per mode, block-diagonal singular value store
    std::vector<bool> recoverable; // v above the regularization threshold
    Eigen::VectorXd row_norm_sq;   // ||demod_full row||^2 per mode (noise transfer)
    Eigen::VectorXd leakage;       // per-mode off-diagonal power of end_to_end

    double block_residual = 0.0;
    std::vector<double> sym_residual;        // per top-level block (empty for N = 1)
    std::vector<Eigen::VectorXcd> phase_shift;  // P diagonal per block
    std::vector<Eigen::MatrixXcd> decode;       // U per block
    std::vector<Eigen::MatrixXcd> precode;      // Q per block

    double zf_rel_threshold = 1e-12;
    double zf_abs_threshold = 0.0;

    std::size_t mode_count() const { return radix.size(); }
    std::size_t active_mode_count() const {
        std::size_t n = 0;
        for (bool b : recoverable) n += b ? 1 : 0;
        return n;
    }
    double max_sym_residual() const {
        double m = 0.0;
        for (double s : sym_residual) m = std::max(m, s);
        return m;
    }
};

// Builds the full receive chain from the noiseless channel. Symmetric mode
// (K_n = V_n) is required; the per-block precoders derived here are folded
// back into the returned pipeline's modulation set.
inline DemodPipeline calibrate_pipeline(const ChannelMatrix& channel,
                                        double zf_rel_threshold = 1e-12) {
    if (!channel.config.symmetric_counts())
        throw config_error("counts_rx", "pipeline calibration requires K_n = V_n");

    DemodPipeline pl;
    pl.config = channel.config;
    pl.distance_mode = channel.mode;
    pl.radix = channel.config.radix(Side::tx);
    pl.zf_rel_threshold = zf_rel_threshold;

    const std::vector<int>& counts = pl.radix.counts();
    const int levels = pl.radix.levels();
    const auto m = static_cast<Eigen::Index>(pl.radix.size());
    const int top = counts.back();
    const Eigen::Index block = m / top;
    const double inv_sqrt_top = 1.0 / std::sqrt(static_cast<double>(top));

    const ModulationSet plain = build_modulation_set(counts);
    const Eigen::MatrixXcd w_top_hat = plain.top_idft * inv_sqrt_top;  // unitary
    const BlockDiagResult bd = block_diagonalize(channel.h, plain);
    pl.block_residual = bd.residual;
    pl.equivalent_blocks = bd.blocks;

    pl.mode_gain.resize(m);
    if (levels == 1) {
        // Single ring: the blocks are scalars; zero forcing divides by the
        // complex diagonal directly.
        pl.mset = plain;
        Eigen::VectorXcd diag = bd.transformed.diagonal();
        for (Eigen::Index i = 0; i < m; ++i) pl.mode_gain(i) = std::abs(diag(i));
        pl.demod_pre = w_top_hat.adjoint();

        const double vmax = pl.mode_gain.maxCoeff();
        pl.zf_abs_threshold = zf_rel_threshold * vmax;
        pl.recoverable.assign(static_cast<std::size_t>(m), false);
        Eigen::VectorXcd inv = Eigen::VectorXcd::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i)
            if (pl.mode_gain(i) > pl.zf_abs_threshold) {
                pl.recoverable[static_cast<std::size_t>(i)] = true;
                inv(i) = 1.0 / diag(i);
            }
        pl.demod_full = inv.asDiagonal() * pl.demod_pre;
    } else {
        const Eigen::MatrixXcd w_sub_hat =
            block_idft(counts, levels - 1) / std::sqrt(static_cast<double>(counts[static_cast<std::size_t>(levels) - 2]));

        // Lower-level chain below the SVD stage: identity for N = 2,
        // otherwise I_{K_{N-1}} kron the unitary nested product of levels
        // 1..N-2.
        Eigen::MatrixXcd lambda_low_hat;
        if (levels == 2) {
            lambda_low_hat = Eigen::MatrixXcd::Identity(block, block);
        } else {
            const std::vector<int> prefix(counts.begin(), counts.end() - 2);
            const MixedRadix prefix_radix(prefix);
            const Eigen::MatrixXcd low =
                nested_modulation(prefix, static_cast<int>(prefix.size())) /
                std::sqrt(static_cast<double>(prefix_radix.size()));
            const int k_sub = counts[static_cast<std::size_t>(levels) - 2];
            lambda_low_hat = kron(Eigen::MatrixXcd::Identity(k_sub, k_sub), low);
        }

        std::vector<Eigen::MatrixXcd> pre_blocks;
        pre_blocks.reserve(static_cast<std::size_t>(top));
        std::vector<Eigen::VectorXd> block_sv(static_cast<std::size_t>(top));
        for (int l = 0; l < top; ++l) {
            const Eigen::MatrixXcd mode_block = w_sub_hat.adjoint() * bd.blocks[static_cast<std::size_t>(l)] * w_sub_hat;
            SymmetrizeResult sym = phase_shift_symmetrize(mode_block);
            SvdFactor f = factor_symmetric(sym.symmetrized);

            pl.sym_residual.push_back(sym.residual);
            pl.phase_shift.push_back(sym.phases);
            pl.decode.push_back(f.u);
            pl.precode.push_back(f.q);
            block_sv[static_cast<std::size_t>(l)] = f.singular_values;
            pl.mode_gain.segment(l * block, block) = f.singular_values;
            pre_blocks.push_back(f.u.adjoint() * sym.phases.asDiagonal() * w_sub_hat.adjoint());
        }

        const double vmax = pl.mode_gain.maxCoeff();
        pl.zf_abs_threshold = zf_rel_threshold * vmax;
        pl.recoverable.assign(static_cast<std::size_t>(m), false);

        std::vector<Eigen::MatrixXcd> full_blocks;
        full_blocks.reserve(static_cast<std::size_t>(top));
        for (int l = 0; l < top; ++l) {
            Eigen::VectorXd inv = Eigen::VectorXd::Zero(block);
            for (Eigen::Index p = 0; p < block; ++p) {
                const double v = block_sv[static_cast<std::size_t>(l)](p);
                if (v > pl.zf_abs_threshold) {
                    pl.recoverable[static_cast<std::size_t>(l * block + p)] = true;
                    inv(p) = 1.0 / v;
                }
            }
            full_blocks.push_back(lambda_low_hat.adjoint() *
                                  (inv.asDiagonal() * pre_blocks[static_cast<std::size_t>(l)]));
        }

        pl.demod_pre = blkdiag(pre_blocks) * w_top_hat.adjoint();
        pl.demod_full = blkdiag(full_blocks) * w_top_hat.adjoint();
        pl.mset = build_modulation_set(counts, pl.precode);
    }

    pl.tx = tx_matrix(pl.mset);
    pl.effective = channel.h * pl.tx;
    pl.end_to_end = pl.demod_full * pl.effective;

    pl.row_norm_sq.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) pl.row_norm_sq(i) = pl.demod_full.row(i).squaredNorm();
    pl.leakage.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != i) off += std::norm(pl.end_to_end(i, j));
        pl.leakage(i) = off;
    }
    return pl;
}

// Receive vector through the channel followed by the normalized top-level
// DFT (the first demodulation stage on its own).
inline Eigen::VectorXcd top_demodulate(const ChannelMatrix& channel, const ModulationSet& mset,
                                       const Eigen::VectorXcd& symbols,
                                       const Eigen::VectorXcd* noise = nullptr) {
    Eigen::VectorXcd received = channel.h * modulate(mset, symbols);
    if (noise != nullptr) {
        if (noise->size() != received.size())
            throw std::invalid_argument("top_demodulate: noise length mismatch");
        received += *noise;
    }
    const int top = mset.counts.back();
    return (mset.top_idft.adjoint() * received) / std::sqrt(static_cast<double>(top));
}

struct DemodReport {
    Eigen::VectorXcd recovered;
    Eigen::VectorXd mode_gain;
    std::vector<bool> recoverable;
    Eigen::VectorXd leakage;          // per-mode off-diagonal response power
    Eigen::VectorXd sigma2;           // per-mode post-processing noise variance
    Eigen::VectorXd recovered_error;  // |recovered - sent| / max|sent|
    double block_residual = 0.0;
    double max_sym_residual = 0.0;
    double oracle_error = std::numeric_limits<double>::quiet_NaN();  // set when an oracle is run
};

// Runs the calibrated chain on one symbol frame. `noise` (optional) is added
// at the receive logical elements; `noise_var` is only used to report the
// per-mode post-processing variance, which is noise_var times the squared
// norm of the mode's composite demodulation row.
inline DemodReport recursive_demodulate(const DemodPipeline& pl, const Eigen::VectorXcd& symbols,
                                        const Eigen::VectorXcd* noise = nullptr,
                                        double noise_var = 0.0) {
    const auto m = static_cast<Eigen::Index>(pl.mode_count());
    if (symbols.size() != m)
        throw std::invalid_argument("recursive_demodulate: symbol vector length mismatch");
    Eigen::VectorXcd received = pl.effective * symbols;
    if (noise != nullptr) {
        if (noise->size() != m)
            throw std::invalid_argument("recursive_demodulate: noise length mismatch");
        received += *noise;
    }

    DemodReport rep;
    rep.recovered = pl.demod_full * received;
    rep.mode_gain = pl.mode_gain;
    rep.recoverable = pl.recoverable;
    rep.leakage = pl.leakage;
    rep.sigma2 = noise_var * pl.row_norm_sq;
    rep.block_residual = pl.block_residual;
    rep.max_sym_residual = pl.max_sym_residual();
    const double scale = symbols.cwiseAbs().maxCoeff();
    rep.recovered_error.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
        rep.recovered_error(i) = scale > 0.0 ? std::abs(rep.recovered(i) - symbols(i)) / scale
                                             : std::abs(rep.recovered(i));
    return rep;
}

// Calibrate-and-run convenience for one-shot use.
inline DemodReport recursive_demodulate(const ChannelMatrix& channel,
                                        const Eigen::VectorXcd& symbols,
                                        const Eigen::VectorXcd* noise = nullptr,
                                        double noise_var = 0.0) {
    return recursive_demodulate(calibrate_pipeline(channel), symbols, noise, noise_var);
}

// The per-mode singular value store (positional within each top-level
// block, descending per block by the SVD convention).
inline const Eigen::VectorXd& effective_mode_gains(const DemodPipeline& pl) {
    return pl.mode_gain;
}

}  // namespace qfuca
