#pragma once

#include "pcorr/poly.hpp"

#include <span>
#include <vector>

namespace pcorr {

class PolyMatrix {
  public:
    PolyMatrix(RingPtr ring, std::size_t rows, std::size_t cols)
        : ring_(std::move(ring)), rows_(rows), cols_(cols), entries_(rows * cols, Poly(ring_)) {
        if (rows == 0 || cols == 0) throw InputError("PolyMatrix dimensions must be positive");
    }

    static PolyMatrix identity(RingPtr ring, std::size_t n) {
        PolyMatrix m(ring, n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Poly::constant(ring, 1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const RingPtr& ring() const { return ring_; }

    Poly& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Poly& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    PolyMatrix transpose() const {
        PolyMatrix t(ring_, cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
        if (a.cols_ != b.rows_) throw InputError("PolyMatrix product: shape mismatch");
        PolyMatrix m(a.ring_, a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t c = 0; c < b.cols_; ++c) {
                Poly acc(a.ring_);
                for (std::size_t k = 0; k < a.cols_; ++k) {
                    if (a(r, k).is_zero() || b(k, c).is_zero()) continue;
                    acc += a(r, k) * b(k, c);
                }
                m(r, c) = std::move(acc);
            }
        return m;
    }

    /// Submatrix with the given (0-based) row and column indices, in order.
    PolyMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
        PolyMatrix m(ring_, rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = (*this)(rows[r], cols[c]);
        return m;
    }

    std::size_t nonzeros() const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += !e.is_zero();
        return n;
    }

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

  private:
    RingPtr ring_;
    std::size_t rows_, cols_;
    std::vector<Poly> entries_;
};

inline constexpr std::size_t kMaxDeterminantSize = 12;

Poly det(const PolyMatrix& m);

namespace detail {

/// Fraction-free Gaussian elimination.
inline Poly bareiss(PolyMatrix m) {
    const std::size_t n = m.rows();
    Integer sign = 1;
    Poly prev = Poly::constant(m.ring(), 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k).is_zero()) {
            std::size_t r = k + 1;
            while (r < n && m(r, k).is_zero()) ++r;
            if (r == n) return Poly(m.ring());
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(r, c));
            sign = -sign;
        }
        const bool unit_prev = prev.is_constant() && prev.constant_term() == 1;
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Poly v = m(k, k) * m(i, j) - m(i, k) * m(k, j);
                m(i, j) = unit_prev ? std::move(v) : divide_exact(v, prev);
            }
            m(i, k) = Poly(m.ring());
        }
        prev = m(k, k);
    }
    return m(n - 1, n - 1).scaled(sign);
}

/// Laplace expansion along the row with the fewest nonzero entries.
inline Poly cofactor_sparse(const PolyMatrix& m) {
    const std::size_t n = m.rows();
    std::size_t best = 0, best_nz = n + 1;
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t nz = 0;
        for (std::size_t c = 0; c < n; ++c) nz += !m(r, c).is_zero();
        if (nz < best_nz) {
            best = r;
            best_nz = nz;
        }
    }
    Poly result(m.ring());
    if (best_nz == 0) return result;
    std::vector<std::size_t> rows, cols;
    for (std::size_t r = 0; r < n; ++r)
        if (r != best) rows.push_back(r);
    for (std::size_t c = 0; c < n; ++c) {
        if (m(best, c).is_zero()) continue;
        cols.clear();
        for (std::size_t k = 0; k < n; ++k)
            if (k != c) cols.push_back(k);
        Poly minor = det(m.submatrix(rows, cols));
        if (minor.is_zero()) continue;
        Poly term = m(best, c) * minor;
        if ((best + c) % 2) result -= term;
        else result += term;
    }
    return result;
}

} // namespace detail

/// Exact determinant. Bareiss elimination for matrices with at least 40%
/// nonzero entries, cofactor expansion along the sparsest row otherwise.
inline Poly det(const PolyMatrix& m) {
    if (m.rows() != m.cols()) throw InputError("det: matrix is not square");
    const std::size_t n = m.rows();
    if (n > kMaxDeterminantSize) throw InputError("det: matrix larger than 12x12");
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (10 * m.nonzeros() >= 4 * n * n) return detail::bareiss(m);
    return detail::cofactor_sparse(m);
}

} // namespace pcorr
