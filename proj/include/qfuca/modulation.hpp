// SPDX-License-Identifier: Apache-2.0
//
// Multidimensional IDFT modulation. The per-level matrices are stored in
// their raw (unnormalized) root-of-unity form; the single 1/sqrt(prod K)
// scale that makes the end-to-end map unitary is applied once in
// modulate(). The nested matrix for the full array factors as a Kronecker
// chain of the per-level IDFTs when the precoder is the identity.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qfuca/indexing.hpp"

namespace qfuca {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXcd blkdiag(const std::vector<Eigen::MatrixXcd>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) { rows += b.rows(); cols += b.cols(); }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

// 1D IDFT matrix of order K, entry (k, l) = exp(+j 2 pi l k / K). Raw form;
// divide by sqrt(K) for the unitary variant. The integer k*l is reduced
// mod K before the trig call so entries are exact roots of unity.
inline Eigen::MatrixXcd idft_matrix(int K) {
    if (K < 1) throw std::invalid_argument("idft_matrix: K must be >= 1");
    Eigen::MatrixXcd w(K, K);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
            const long long r = (static_cast<long long>(k) * l) % K;
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(r) / K;
            w(k, l) = std::polar(1.0, phase);
        }
    return w;
}

inline Eigen::MatrixXcd idft_matrix_unitary(int K) {
    return idft_matrix(K) / std::sqrt(static_cast<double>(K));
}

namespace detail {
inline std::size_t prod_below(const std::vector<int>& counts, int n) {
    std::size_t p = 1;
    for (int i = 1; i < n; ++i) p *= static_cast<std::size_t>(counts[static_cast<std::size_t>(i) - 1]);
    return p;
}
}  // namespace detail

// Level-n block IDFT matrix W_n of order prod_{i<=n} K_i: the level-n roots
// of unity scaling identity blocks of order prod_{i<n} K_i.
inline Eigen::MatrixXcd block_idft(const std::vector<int>& counts, int n) {
    const int levels = static_cast<int>(counts.size());
    if (n < 1 || n > levels) throw std::out_of_range("block_idft: level out of range");
    const auto inner = static_cast<Eigen::Index>(detail::prod_below(counts, n));
    return kron(idft_matrix(counts[static_cast<std::size_t>(n) - 1]),
                Eigen::MatrixXcd::Identity(inner, inner));
}

inline void require_unitary(const Eigen::MatrixXcd& q, const char* what, double tol = 1e-9) {
    if (q.rows() != q.cols()) throw std::invalid_argument(std::string(what) + ": must be square");
    const Eigen::MatrixXcd gram = q.adjoint() * q;
    const double dev = (gram - Eigen::MatrixXcd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw std::invalid_argument(std::string(what) + ": not unitary (deviation " +
                                    std::to_string(dev) + ")");
}

// Nested modulation matrix W_{k_n} of order prod_{i<=n} K_i, built by the
// recursion W_{k_n} = W_n * Lambda_n with Lambda_n = blkdiag of K_n copies
// of W_{k_{n-1}} and base case W_{k_1} = W_1. A precoder, when supplied,
// enters at level N-1 only: W_{k_{N-1}} = W_{N-1} * Q * Lambda_{N-1}.
inline Eigen::MatrixXcd nested_modulation(const std::vector<int>& counts, int n,
                                          const Eigen::MatrixXcd* precoder = nullptr) {
    const int levels = static_cast<int>(counts.size());
    if (n < 1 || n > levels) throw std::out_of_range("nested_modulation: level out of range");
    if (precoder != nullptr) {
        if (levels < 2)
            throw std::invalid_argument("nested_modulation: precoder needs at least two levels");
        const auto order = static_cast<Eigen::Index>(detail::prod_below(counts, levels));
        if (precoder->rows() != order || precoder->cols() != order)
            throw std::invalid_argument("nested_modulation: precoder order mismatch");
        require_unitary(*precoder, "nested_modulation precoder");
    }

    Eigen::MatrixXcd nested = idft_matrix(counts[0]);
    if (levels >= 2 && levels - 1 == 1 && precoder != nullptr)
        nested = nested * (*precoder);
    for (int level = 2; level <= n; ++level) {
        const int copies = counts[static_cast<std::size_t>(level) - 1];
        std::vector<Eigen::MatrixXcd> diag(static_cast<std::size_t>(copies), nested);
        const Eigen::MatrixXcd lambda = blkdiag(diag);
        if (level == levels - 1 && precoder != nullptr)
            nested = block_idft(counts, level) * (*precoder) * lambda;
        else
            nested = block_idft(counts, level) * lambda;
    }
    return nested;
}

// The full modulation operator. `precoders` holds the level-(N-1) precoder:
// empty = identity, one entry = shared across the K_N top-level cells,
// K_N entries = one per cell (the calibrated pipeline feeds these back).
struct ModulationSet {
    std::vector<int> counts;
    std::vector<Eigen::MatrixXcd> precoders;
    Eigen::MatrixXcd top_idft;    // W_N, raw
    Eigen::MatrixXcd lambda_top;  // Lambda_N, raw, precoders folded in
    Eigen::MatrixXcd tx_raw;      // W_N * Lambda_N
    double unit_norm = 1.0;       // 1/sqrt(prod K)

    std::size_t size() const { return static_cast<std::size_t>(tx_raw.cols()); }
};

inline ModulationSet build_modulation_set(std::vector<int> counts,
                                          std::vector<Eigen::MatrixXcd> precoders = {}) {
    MixedRadix radix(counts);
    const int levels = radix.levels();
    const int top = counts[static_cast<std::size_t>(levels) - 1];
    if (!precoders.empty() && precoders.size() != 1 &&
        precoders.size() != static_cast<std::size_t>(top))
        throw std::invalid_argument("build_modulation_set: need 0, 1, or K_N precoders");

    ModulationSet m;
    m.counts = counts;
    m.precoders = std::move(precoders);
    m.top_idft = block_idft(counts, levels);
    m.unit_norm = 1.0 / std::sqrt(static_cast<double>(radix.size()));

    const auto block = static_cast<Eigen::Index>(radix.size() / static_cast<std::size_t>(top));
    if (levels == 1) {
        m.lambda_top = Eigen::MatrixXcd::Identity(block * top, block * top);
    } else {
        std::vector<Eigen::MatrixXcd> diag;
        diag.reserve(static_cast<std::size_t>(top));
        for (int l = 0; l < top; ++l) {
            const Eigen::MatrixXcd* q = nullptr;
            if (m.precoders.size() == 1) q = &m.precoders[0];
            else if (!m.precoders.empty()) q = &m.precoders[static_cast<std::size_t>(l)];
            diag.push_back(nested_modulation(counts, levels - 1, q));
        }
        m.lambda_top = blkdiag(diag);
    }
    m.tx_raw = m.top_idft * m.lambda_top;
    return m;
}

// Unitary end-to-end transmit map (raw product with the global scale).
inline Eigen::MatrixXcd tx_matrix(const ModulationSet& m) { return m.tx_raw * m.unit_norm; }

// X = W_N Lambda_N S with the global 1/sqrt(prod K) applied once.
inline Eigen::VectorXcd modulate(const ModulationSet& m, const Eigen::VectorXcd& symbols) {
    if (symbols.size() != m.tx_raw.cols())
        throw std::invalid_argument("modulate: symbol vector length mismatch");
    return m.unit_norm * (m.tx_raw * symbols);
}

}  // namespace qfuca
