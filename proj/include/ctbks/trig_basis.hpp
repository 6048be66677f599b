#pragma once

// Trigonometric cubic B-splines on a uniform grid.
//
// T_i is supported on [x_{i-2}, x_{i+2}] and built from half-angle sines
//   W(x_j) = sin((x - x_j)/2),   Y(x_j) = sin((x_j - x)/2),
// normalized by sin(h/2) sin(h) sin(3h/2). Each of the four pieces is a sum
// of triple products of such factors, which lets value and both derivatives
// be produced by the product rule without symbolic bookkeeping.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ctbks {

/// Largest admissible spacing (exclusive): sin(3h/2) and 1 + 2cos(h) vanish here.
inline constexpr double kMaxSpacing = 2.0 * std::numbers::pi / 3.0;

class UniformGrid {
public:
    UniformGrid(double a, double b, int n_intervals)
        : a_(a), b_(b), n_(n_intervals), h_((b - a) / n_intervals) {
        if (n_intervals < 2) {
            throw std::invalid_argument("UniformGrid: need at least 2 intervals, got " +
                                        std::to_string(n_intervals));
        }
        if (!(b > a)) {
            throw std::invalid_argument("UniformGrid: require b > a");
        }
        if (!(h_ < kMaxSpacing)) {
            throw std::domain_error("UniformGrid: spacing h = " + std::to_string(h_) +
                                    " must be below 2*pi/3");
        }
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int intervals() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }

    /// x_i for i in -2..N+2 (extension knots included).
    double knot(int i) const noexcept { return a_ + i * h_; }

private:
    double a_;
    double b_;
    int n_;
    double h_;
};

/// Nodal values of T_i and its first two derivatives at x_{i-1}, x_i, x_{i+1}:
///   T(x_{i±1}) = alpha1, T(x_i) = alpha2,
///   T'(x_{i-1}) = -beta1, T'(x_{i+1}) = beta1,
///   T''(x_{i±1}) = gamma1, T''(x_i) = gamma2.
struct KnotConstants {
    double alpha1;
    double alpha2;
    double beta1;
    double gamma1;
    double gamma2;
};

inline KnotConstants knot_constants(double h) {
    if (!(h > 0.0) || !(h < kMaxSpacing)) {
        throw std::domain_error("knot_constants: spacing h = " + std::to_string(h) +
                                " outside (0, 2*pi/3)");
    }
    const double s_half = std::sin(h / 2.0);
    const double s_one = std::sin(h);
    const double s_three_half = std::sin(1.5 * h);
    const double cos_h = std::cos(h);
    const double cot_half = std::cos(h / 2.0) / s_half;

    KnotConstants k{};
    k.alpha1 = s_half * s_half / (s_one * s_three_half);
    k.alpha2 = 2.0 / (1.0 + 2.0 * cos_h);
    k.beta1 = -0.75 / s_three_half;
    k.gamma1 = 3.0 * (1.0 + 3.0 * cos_h) / (s_half * s_half) /
               (16.0 * (2.0 * std::cos(h / 2.0) + std::cos(1.5 * h)));
    // cot(h/2), not cot(3h/2): direct differentiation of the centre piece agrees.
    k.gamma2 = -3.0 * cot_half * cot_half / (2.0 + 4.0 * cos_h);
    return k;
}

/// Value and first two derivatives of a scalar function at one point.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

namespace detail {

// sign * sin((x - c)/2) with derivatives; arg is already (x - c).
inline Jet half_sine(double arg, double sign) {
    const double s = std::sin(0.5 * arg);
    const double c = std::cos(0.5 * arg);
    return {sign * s, 0.5 * sign * c, -0.25 * sign * s};
}

inline Jet triple(const Jet& f, const Jet& g, const Jet& k) {
    Jet r;
    r.value = f.value * g.value * k.value;
    r.d1 = f.d1 * g.value * k.value + f.value * g.d1 * k.value + f.value * g.value * k.d1;
    r.d2 = f.d2 * g.value * k.value + f.value * g.d2 * k.value + f.value * g.value * k.d2 +
           2.0 * (f.d1 * g.d1 * k.value + f.d1 * g.value * k.d1 + f.value * g.d1 * k.d1);
    return r;
}

inline void accumulate(Jet& into, const Jet& term) {
    into.value += term.value;
    into.d1 += term.d1;
    into.d2 += term.d2;
}

}  // namespace detail

/// T_i and its first two derivatives at x. Basis index i ranges over -1..N+1.
///
/// At a knot shared by two pieces the left piece is used; the pieces agree
/// there up to roundoff because T_i is C^2.
inline Jet eval_basis_jet(const UniformGrid& grid, int i, double x) {
    const double h = grid.spacing();
    const double s = x - grid.knot(i);
    if (s < -2.0 * h || s > 2.0 * h) {
        return {};
    }

    // W(x_{i+j}) = sin((s - j h)/2), Y(x_{i+j}) = -W(x_{i+j}).
    auto w = [&](int j) { return detail::half_sine(s - j * h, 1.0); };
    auto y = [&](int j) { return detail::half_sine(s - j * h, -1.0); };

    Jet r;
    if (s <= -h) {
        r = detail::triple(w(-2), w(-2), w(-2));
    } else if (s <= 0.0) {
        detail::accumulate(r, detail::triple(w(-2), w(-2), y(0)));
        detail::accumulate(r, detail::triple(w(-2), y(1), w(-1)));
        detail::accumulate(r, detail::triple(y(2), w(-1), w(-1)));
    } else if (s <= h) {
        detail::accumulate(r, detail::triple(w(-2), y(1), y(1)));
        detail::accumulate(r, detail::triple(y(2), w(-1), y(1)));
        detail::accumulate(r, detail::triple(y(2), y(2), w(0)));
    } else {
        r = detail::triple(y(2), y(2), y(2));
    }

    const double norm = std::sin(0.5 * h) * std::sin(h) * std::sin(1.5 * h);
    r.value /= norm;
    r.d1 /= norm;
    r.d2 /= norm;
    return r;
}

inline double eval_basis(const UniformGrid& grid, int i, double x) {
    return eval_basis_jet(grid, i, x).value;
}

inline double eval_basis_derivative(const UniformGrid& grid, int i, double x, int order) {
    const Jet j = eval_basis_jet(grid, i, x);
    switch (order) {
        case 1:
            return j.d1;
        case 2:
            return j.d2;
        default:
            throw std::invalid_argument("eval_basis_derivative: unsupported order " +
                                        std::to_string(order));
    }
}

/// Order-k trigonometric B-spline from the half-angle recursion, starting at
/// the indicator of [x_i, x_{i+1}). Support is [x_i, x_{i+k}]. This is an
/// independent cross-check of eval_basis: the k = 4 function equals a fixed
/// multiple of T_{i+2}, the factor depending only on h.
inline double eval_basis_recursive(const UniformGrid& grid, int i, double x, int k) {
    if (k < 1 || k > 4) {
        throw std::invalid_argument("eval_basis_recursive: order must be in 1..4");
    }
    if (k == 1) {
        return (x >= grid.knot(i) && x < grid.knot(i + 1)) ? 1.0 : 0.0;
    }
    const double left = std::sin((x - grid.knot(i)) / 2.0) /
                        std::sin((grid.knot(i + k - 1) - grid.knot(i)) / 2.0);
    const double right = std::sin((grid.knot(i + k) - x) / 2.0) /
                         std::sin((grid.knot(i + k) - grid.knot(i + 1)) / 2.0);
    return left * eval_basis_recursive(grid, i, x, k - 1) +
           right * eval_basis_recursive(grid, i + 1, x, k - 1);
}

/// Three-term stencil: U, U', U'' at x_i from (c_{i-1}, c_i, c_{i+1}).
inline Jet nodal_values(const std::array<double, 3>& window, const KnotConstants& k) {
    const auto [left, centre, right] = window;
    return {k.alpha1 * left + k.alpha2 * centre + k.alpha1 * right,
            k.beta1 * left - k.beta1 * right,
            k.gamma1 * left + k.gamma2 * centre + k.gamma1 * right};
}

}  // namespace ctbks
