#pragma once

// Band-stored square matrices and a direct banded LU with optional partial
// pivoting. The KS collocation system is a 6-wide interleaved band, so a
// general banded LU stands in for a bespoke block Thomas recurrence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbks {

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t row, double pivot)
        : std::runtime_error("singular matrix: pivot " + std::to_string(pivot) + " at row " +
                             std::to_string(row)),
          row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class BandedMatrix {
public:
    BandedMatrix(std::size_t dim, std::size_t kl, std::size_t ku)
        : dim_(dim), kl_(kl), ku_(ku), width_(kl + ku + 1), data_(dim * (kl + ku + 1), 0.0) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }

    bool in_band(std::size_t r, std::size_t c) const noexcept {
        return r < dim_ && c < dim_ && c + kl_ >= r && c <= r + ku_;
    }

    /// Entries outside the band read as exactly zero.
    double operator()(std::size_t r, std::size_t c) const noexcept {
        return in_band(r, c) ? data_[index(r, c)] : 0.0;
    }

    void set(std::size_t r, std::size_t c, double value) { data_[checked_index(r, c)] = value; }
    void add(std::size_t r, std::size_t c, double value) { data_[checked_index(r, c)] += value; }

    /// First and last column stored for row r.
    std::size_t row_begin(std::size_t r) const noexcept { return r > kl_ ? r - kl_ : 0; }
    std::size_t row_end(std::size_t r) const noexcept { return std::min(dim_, r + ku_ + 1); }

    std::vector<double> multiply(std::span<const double> x) const {
        if (x.size() != dim_) {
            throw std::invalid_argument("BandedMatrix::multiply: dimension mismatch");
        }
        std::vector<double> y(dim_, 0.0);
        for (std::size_t r = 0; r < dim_; ++r) {
            double acc = 0.0;
            for (std::size_t c = row_begin(r); c < row_end(r); ++c) {
                acc += data_[index(r, c)] * x[c];
            }
            y[r] = acc;
        }
        return y;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Infinity norm (max absolute row sum).
    double norm_inf() const noexcept {
        double m = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
            double s = 0.0;
            for (std::size_t c = row_begin(r); c < row_end(r); ++c) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

    bool operator==(const BandedMatrix&) const = default;

private:
    std::size_t index(std::size_t r, std::size_t c) const noexcept {
        return r * width_ + (c + kl_ - r);
    }
    std::size_t checked_index(std::size_t r, std::size_t c) const {
        if (!in_band(r, c)) {
            throw std::out_of_range("BandedMatrix: entry (" + std::to_string(r) + ", " +
                                    std::to_string(c) + ") outside band");
        }
        return index(r, c);
    }

    std::size_t dim_;
    std::size_t kl_;
    std::size_t ku_;
    std::size_t width_;
    std::vector<double> data_;
};

enum class Pivoting { none, partial };

/// Relative pivot threshold: a pivot below this times max|A| is singular.
inline constexpr double kSingularPivotTolerance = 1e-13;

/// Gaussian elimination record: U in row windows widened by kl for pivot fill,
/// multipliers stored per column, and the row interchange made at each step.
/// Immutable once built; solve() may be called concurrently.
class BandedFactorization {
public:
    std::size_t dim() const noexcept { return dim_; }

    std::vector<double> solve(std::span<const double> rhs) const {
        if (rhs.size() != dim_) {
            throw std::invalid_argument("BandedFactorization::solve: rhs has length " +
                                        std::to_string(rhs.size()) + ", expected " +
                                        std::to_string(dim_));
        }
        std::vector<double> x(rhs.begin(), rhs.end());
        for (std::size_t k = 0; k < dim_; ++k) {
            if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
            const std::size_t last = std::min(dim_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= last; ++i) {
                x[i] -= multiplier(i, k) * x[k];
            }
        }
        for (std::size_t r = dim_; r-- > 0;) {
            double acc = x[r];
            const std::size_t last = std::min(dim_ - 1, r + uw_);
            for (std::size_t c = r + 1; c <= last; ++c) acc -= upper(r, c) * x[c];
            x[r] = acc / upper(r, r);
        }
        return x;
    }

    /// Dense P_0 L_0 P_1 L_1 ... U, for verifying the factorization.
    std::vector<std::vector<double>> reconstruct() const {
        std::vector<std::vector<double>> m(dim_, std::vector<double>(dim_, 0.0));
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = r; c <= std::min(dim_ - 1, r + uw_); ++c) m[r][c] = upper(r, c);
        }
        for (std::size_t k = dim_; k-- > 0;) {
            const std::size_t last = std::min(dim_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= last; ++i) {
                const double mult = multiplier(i, k);
                for (std::size_t c = 0; c < dim_; ++c) m[i][c] += mult * m[k][c];
            }
            if (pivots_[k] != k) std::swap(m[k], m[pivots_[k]]);
        }
        return m;
    }

private:
    friend BandedFactorization lu_factor(const BandedMatrix&, Pivoting);

    BandedFactorization(std::size_t dim, std::size_t kl, std::size_t ku)
        : dim_(dim),
          kl_(kl),
          uw_(kl + ku),
          work_width_(2 * kl + ku + 1),
          work_(dim * (2 * kl + ku + 1), 0.0),
          lower_(dim * kl, 0.0),
          pivots_(dim, 0) {}

    // Working row r holds columns r-kl .. r+kl+ku.
    double& work(std::size_t r, std::size_t c) { return work_[r * work_width_ + (c + kl_ - r)]; }
    double upper(std::size_t r, std::size_t c) const {
        return work_[r * work_width_ + (c + kl_ - r)];
    }
    double multiplier(std::size_t i, std::size_t k) const { return lower_[k * kl_ + (i - k - 1)]; }

    std::size_t dim_;
    std::size_t kl_;
    std::size_t uw_;
    std::size_t work_width_;
    std::vector<double> work_;
    std::vector<double> lower_;
    std::vector<std::size_t> pivots_;
};

inline BandedFactorization lu_factor(const BandedMatrix& m, Pivoting pivoting = Pivoting::partial) {
    const std::size_t n = m.dim();
    const std::size_t kl = m.lower();
    BandedFactorization f(n, kl, m.upper());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = m.row_begin(r); c < m.row_end(r); ++c) f.work(r, c) = m(r, c);
    }

    const double tol = kSingularPivotTolerance * m.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last_row = std::min(n - 1, k + kl);
        const std::size_t last_col = std::min(n - 1, k + f.uw_);

        std::size_t p = k;
        if (pivoting == Pivoting::partial) {
            for (std::size_t i = k + 1; i <= last_row; ++i) {
                if (std::abs(f.work(i, k)) > std::abs(f.work(p, k))) p = i;
            }
        }
        const double pivot = f.work(p, k);
        if (!(std::abs(pivot) > tol)) {
            throw SingularMatrixError(k, pivot);
        }
        f.pivots_[k] = p;
        if (p != k) {
            for (std::size_t c = k; c <= last_col; ++c) std::swap(f.work(k, c), f.work(p, c));
        }

        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double mult = f.work(i, k) / f.work(k, k);
            f.lower_[k * kl + (i - k - 1)] = mult;
            f.work(i, k) = 0.0;
            if (mult == 0.0) continue;
            for (std::size_t c = k + 1; c <= last_col; ++c) f.work(i, c) -= mult * f.work(k, c);
        }
    }
    return f;
}

inline std::vector<double> solve(const BandedFactorization& f, std::span<const double> rhs) {
    return f.solve(rhs);
}

}  // namespace ctbks
