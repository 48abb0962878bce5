// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/linalg.hpp"

#include "ldm3d/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ldm3d {

namespace {

constexpr int kMaxSweeps = 100;

void require_same_size(const SquareMatrix &a, const SquareMatrix &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix sizes differ");
    }
}

double off_diagonal_sq(const SquareMatrix &a) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        for (std::size_t q = p + 1; q < a.size(); ++q) {
            s += a(p, q) * a(p, q);
        }
    }
    return s;
}

} // namespace

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

double SquareMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

SquareMatrix SquareMatrix::transposed() const {
    SquareMatrix t(n_);
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = 0; c < n_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

SquareMatrix operator*(const SquareMatrix &a, const SquareMatrix &b) {
    require_same_size(a, b);
    const std::size_t n = a.size();
    SquareMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ark = a(r, k);
            if (ark == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                out(r, c) += ark * b(k, c);
            }
        }
    }
    return out;
}

SquareMatrix operator+(const SquareMatrix &a, const SquareMatrix &b) {
    require_same_size(a, b);
    SquareMatrix out(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a.size(); ++c) {
            out(r, c) = a(r, c) + b(r, c);
        }
    }
    return out;
}

SquareMatrix operator-(const SquareMatrix &a, const SquareMatrix &b) {
    require_same_size(a, b);
    SquareMatrix out(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a.size(); ++c) {
            out(r, c) = a(r, c) - b(r, c);
        }
    }
    return out;
}

double max_abs(const SquareMatrix &m) {
    double best = 0.0;
    for (double v : m.values()) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

SymmetricEigen jacobi_eigen(const SquareMatrix &m) {
    const std::size_t n = m.size();
    SquareMatrix a(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
            a(p, q) = m(p, q);
            a(q, p) = m(p, q);
        }
    }
    SquareMatrix v = SquareMatrix::identity(n);

    double total = 0.0;
    for (double x : a.values()) {
        total += x * x;
    }
    const double tiny = std::numeric_limits<double>::min();

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal_sq(a);
        if (off <= 1e-32 * total || off < tiny) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // A <- J^T A J with J the (p, q) rotation.
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{std::vector<double>(n), SquareMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

SquareMatrix sqrt_psd(const SquareMatrix &m) {
    const SymmetricEigen eig = jacobi_eigen(m);
    const std::size_t n = m.size();
    std::vector<double> root(n);
    for (std::size_t k = 0; k < n; ++k) {
        root[k] = std::sqrt(std::max(eig.values[k], 0.0));
    }
    SquareMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += eig.vectors(r, k) * root[k] * eig.vectors(c, k);
            }
            out(r, c) = s;
            out(c, r) = s;
        }
    }
    return out;
}

} // namespace ldm3d
