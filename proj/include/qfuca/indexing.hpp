// SPDX-License-Identifier: Apache-2.0
//
// Mixed-radix index arithmetic shared by the geometry, modulation and
// channel modules. A logical array-element or OAM mode on an N-level
// array is addressed by a digit tuple with 0 <= digit_n < count_n.
// Level 1 is the innermost ring; it varies fastest in the linear layout,
// which fixes the row/column ordering of every block matrix in the
// library.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfuca {

using cxd = std::complex<double>;

enum class Side { tx, rx };

inline const char* side_name(Side s) { return s == Side::tx ? "tx" : "rx"; }

class MixedRadix {
public:
    MixedRadix() = default;

    explicit MixedRadix(std::vector<int> counts) : counts_(std::move(counts)) {
        if (counts_.empty())
            throw std::invalid_argument("MixedRadix: at least one level required");
        for (int k : counts_)
            if (k < 1)
                throw std::invalid_argument("MixedRadix: counts must be >= 1");
    }

    int levels() const { return static_cast<int>(counts_.size()); }
    const std::vector<int>& counts() const { return counts_; }

    // 1-based level accessor, matching the usual K_n notation.
    int count(int level) const { return counts_.at(static_cast<std::size_t>(level) - 1); }

    std::size_t size() const {
        std::size_t n = 1;
        for (int k : counts_) n *= static_cast<std::size_t>(k);
        return n;
    }

    // Stride of a level in the linear layout; level 1 has stride 1.
    std::size_t stride(int level) const {
        std::size_t s = 1;
        for (int i = 1; i < level; ++i) s *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(i) - 1]);
        return s;
    }

    bool valid(std::span<const int> digits) const {
        if (digits.size() != counts_.size()) return false;
        for (std::size_t i = 0; i < counts_.size(); ++i)
            if (digits[i] < 0 || digits[i] >= counts_[i]) return false;
        return true;
    }

    std::size_t linear(std::span<const int> digits) const {
        if (!valid(digits))
            throw std::out_of_range("MixedRadix: digit out of range for level");
        std::size_t idx = 0;
        std::size_t s = 1;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            idx += static_cast<std::size_t>(digits[i]) * s;
            s *= static_cast<std::size_t>(counts_[i]);
        }
        return idx;
    }

    std::vector<int> digits(std::size_t linear_index) const {
        if (linear_index >= size())
            throw std::out_of_range("MixedRadix: linear index out of range");
        std::vector<int> d(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            d[i] = static_cast<int>(linear_index % static_cast<std::size_t>(counts_[i]));
            linear_index /= static_cast<std::size_t>(counts_[i]);
        }
        return d;
    }

private:
    std::vector<int> counts_;  // counts_[0] is level 1
};

}  // namespace qfuca
