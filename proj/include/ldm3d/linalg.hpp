// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ldm3d {

/// Dense square matrix, row-major.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double &operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    std::span<const double> values() const noexcept { return data_; }

    double trace() const;
    SquareMatrix transposed() const;

    friend SquareMatrix operator*(const SquareMatrix &a, const SquareMatrix &b);
    friend SquareMatrix operator+(const SquareMatrix &a, const SquareMatrix &b);
    friend SquareMatrix operator-(const SquareMatrix &a, const SquareMatrix &b);

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Largest absolute entry.
double max_abs(const SquareMatrix &m);

struct SymmetricEigen {
    std::vector<double> values;  ///< ascending
    SquareMatrix vectors;        ///< column k pairs with values[k]
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible. Only
/// the upper triangle of `m` is read.
SymmetricEigen jacobi_eigen(const SquareMatrix &m);

/// Principal square root of a symmetric PSD matrix. Negative eigenvalues
/// (numerical noise) are clamped to zero first.
SquareMatrix sqrt_psd(const SquareMatrix &m);

} // namespace ldm3d
