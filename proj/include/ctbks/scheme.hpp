#pragma once

// Linearized Crank-Nicolson collocation system for the order-reduced
// Kuramoto-Sivashinsky equation
//
//   u_t + u u_x + alpha v + theta v_xx = 0,   v = u_xx,
//
// with U = sum delta_i T_i, V = sum phi_i T_i. Unknowns are interleaved as
// (delta_0, phi_0, delta_1, phi_1, ..., delta_N, phi_N); row 2m carries the
// u-equation collocated at x_m and row 2m+1 the v-equation.
//
// Ghosts delta_{-1}, phi_{-1}, delta_{N+1}, phi_{N+1} are eliminated through
// U_xx = 0 and V = 0 at both ends. Under those constraints the v-equation at
// an endpoint reduces to 0 = 0, so rows 1 and 2N+1 carry a boundary closure
// instead (Dirichlet U = g or Neumann U_x = 0).

#include "ctbks/banded.hpp"
#include "ctbks/trig_basis.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbks {

enum class BoundaryClosure { dirichlet, neumann };

struct BoundaryData {
    double g0 = 0.0;  ///< u(a, t), imposed only under the Dirichlet closure
    double g1 = 0.0;  ///< u(b, t)
    BoundaryClosure closure = BoundaryClosure::dirichlet;
};

using ScalarFunction = std::function<double(double)>;

struct KsProblem {
    double alpha = 1.0;  ///< coefficient of u_xx
    double theta = 1.0;  ///< coefficient of u_xxxx
    UniformGrid grid;
    double dt = 0.01;
    ScalarFunction initial_u;
    std::optional<ScalarFunction> initial_v;  ///< u_xx(x, 0); finite differences when absent
    BoundaryData boundary{};

    KnotConstants constants() const { return knot_constants(grid.spacing()); }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("KsProblem: dt must be positive");
        if (theta == 0.0 || !std::isfinite(theta)) {
            throw std::invalid_argument("KsProblem: theta must be finite and nonzero");
        }
        if (!std::isfinite(alpha)) throw std::invalid_argument("KsProblem: alpha must be finite");
        if (!initial_u) throw std::invalid_argument("KsProblem: initial_u is required");
    }
};

/// Spline coefficients including ghosts: index i runs over -1..N+1.
class Coefficients {
public:
    Coefficients() = default;
    explicit Coefficients(int n_intervals)
        : delta_(static_cast<std::size_t>(n_intervals) + 3, 0.0),
          phi_(static_cast<std::size_t>(n_intervals) + 3, 0.0) {}

    int intervals() const noexcept { return static_cast<int>(delta_.size()) - 3; }

    double delta(int i) const { return delta_[slot(i)]; }
    double phi(int i) const { return phi_[slot(i)]; }
    double& delta(int i) { return delta_[slot(i)]; }
    double& phi(int i) { return phi_[slot(i)]; }

    std::array<double, 3> delta_window(int m) const { return {delta(m - 1), delta(m), delta(m + 1)}; }
    std::array<double, 3> phi_window(int m) const { return {phi(m - 1), phi(m), phi(m + 1)}; }

    std::span<const double> all_delta() const noexcept { return delta_; }
    std::span<const double> all_phi() const noexcept { return phi_; }

    bool operator==(const Coefficients&) const = default;

private:
    static std::size_t slot(int i) { return static_cast<std::size_t>(i + 1); }

    std::vector<double> delta_;
    std::vector<double> phi_;
};

/// Per-row linearization data and matrix entries.
/// k1 = U^n(x_m), k2 = U_x^n(x_m); nu1..nu5 are A's u-row entries and
/// nu6..nu9 B's (nu2 repeats on phi_{m+1} in A, nu6/nu7 repeat in B).
struct RowCoefficients {
    double k1 = 0.0;
    double k2 = 0.0;
    double nu1 = 0.0, nu2 = 0.0, nu3 = 0.0, nu4 = 0.0, nu5 = 0.0;
    double nu6 = 0.0, nu7 = 0.0, nu8 = 0.0, nu9 = 0.0;
};

inline RowCoefficients row_coefficients(const KnotConstants& k, const std::array<double, 3>& delta_window,
                                        double dt, double alpha, double theta) {
    const Jet u = nodal_values(delta_window, k);
    RowCoefficients rc;
    rc.k1 = u.value;
    rc.k2 = u.d1;
    const double lead = 2.0 / dt + rc.k2;
    const double side = alpha * k.alpha1 + theta * k.gamma1;
    const double centre = alpha * k.alpha2 + theta * k.gamma2;
    rc.nu1 = lead * k.alpha1 + rc.k1 * k.beta1;
    rc.nu2 = side;
    rc.nu3 = lead * k.alpha2;
    rc.nu4 = centre;
    rc.nu5 = lead * k.alpha1 - rc.k1 * k.beta1;
    rc.nu6 = 2.0 / dt * k.alpha1;
    rc.nu7 = -side;
    rc.nu8 = 2.0 / dt * k.alpha2;
    rc.nu9 = -centre;
    return rc;
}

/// One collocation row over the local window
/// (delta_{m-1}, phi_{m-1}, delta_m, phi_m, delta_{m+1}, phi_{m+1}).
using StencilRow = std::array<double, 6>;

inline StencilRow u_row_lhs(const RowCoefficients& rc) {
    return {rc.nu1, rc.nu2, rc.nu3, rc.nu4, rc.nu5, rc.nu2};
}
inline StencilRow u_row_rhs(const RowCoefficients& rc) {
    return {rc.nu6, rc.nu7, rc.nu8, rc.nu9, rc.nu6, rc.nu7};
}
inline StencilRow v_row_lhs(const KnotConstants& k) {
    return {-k.gamma1, k.alpha1, -k.gamma2, k.alpha2, -k.gamma1, k.alpha1};
}
inline StencilRow v_row_rhs(const KnotConstants& k) {
    return {k.gamma1, -k.alpha1, k.gamma2, -k.alpha2, k.gamma1, -k.alpha1};
}

/// Endpoint closure row over the same window (ghost columns still present).
inline StencilRow closure_row(BoundaryClosure closure, const KnotConstants& k) {
    if (closure == BoundaryClosure::dirichlet) return {k.alpha1, 0.0, k.alpha2, 0.0, k.alpha1, 0.0};
    return {k.beta1, 0.0, 0.0, 0.0, -k.beta1, 0.0};
}

enum class GhostSide { left, right };

/// Substitute the ghost parameters of a boundary row using
///   delta_ghost = -(gamma2/gamma1) delta_end - delta_inner,
///   phi_ghost   = -(alpha2/alpha1) phi_end   - phi_inner,
/// which are U_xx = 0 and V = 0 at the endpoint. Ghost slots end up zero.
inline StencilRow eliminate_ghosts(StencilRow row, GhostSide side, const KnotConstants& k) {
    const double dr = k.gamma2 / k.gamma1;
    const double pr = k.alpha2 / k.alpha1;
    const std::size_t ghost = side == GhostSide::left ? 0 : 4;
    const std::size_t inner = side == GhostSide::left ? 4 : 0;
    const double cd = row[ghost];
    const double cp = row[ghost + 1];
    row[2] -= cd * dr;
    row[inner] -= cd;
    row[3] -= cp * pr;
    row[inner + 1] -= cp;
    row[ghost] = 0.0;
    row[ghost + 1] = 0.0;
    return row;
}

/// Fill the four ghosts from the boundary constraints.
inline Coefficients recover_ghosts(Coefficients c, const KnotConstants& k) {
    const int n = c.intervals();
    const double dr = k.gamma2 / k.gamma1;
    const double pr = k.alpha2 / k.alpha1;
    c.delta(-1) = -dr * c.delta(0) - c.delta(1);
    c.phi(-1) = -pr * c.phi(0) - c.phi(1);
    c.delta(n + 1) = -dr * c.delta(n) - c.delta(n - 1);
    c.phi(n + 1) = -pr * c.phi(n) - c.phi(n - 1);
    return c;
}

/// Bandwidths of the interleaved system: a v-row at 2m+1 reaches delta_{m-1}
/// at column 2m-2, and a u-row at 2m reaches phi_{m+1} at column 2m+3.
inline constexpr std::size_t kSystemLower = 3;
inline constexpr std::size_t kSystemUpper = 3;

inline std::size_t system_dim(const UniformGrid& grid) {
    return 2 * static_cast<std::size_t>(grid.intervals()) + 2;
}

namespace detail {

inline void place_row(BandedMatrix& m, std::size_t row, int node, int n, const StencilRow& s) {
    for (std::size_t slot = 0; slot < s.size(); ++slot) {
        const int col = 2 * (node - 1) + static_cast<int>(slot);
        if (col < 0 || col >= 2 * n + 2) {
            if (s[slot] != 0.0) throw std::logic_error("place_row: ghost column not eliminated");
            continue;
        }
        if (s[slot] != 0.0) m.set(row, static_cast<std::size_t>(col), s[slot]);
    }
}

inline StencilRow fold_if_boundary(const StencilRow& row, int m, int n, const KnotConstants& k) {
    if (m == 0) return eliminate_ghosts(row, GhostSide::left, k);
    if (m == n) return eliminate_ghosts(row, GhostSide::right, k);
    return row;
}

}  // namespace detail

/// Left-hand matrix for the step from level n (coefficients at level n).
inline BandedMatrix assemble_A(const KsProblem& problem, const Coefficients& coeffs) {
    const int n = problem.grid.intervals();
    const KnotConstants k = problem.constants();
    BandedMatrix a(system_dim(problem.grid), kSystemLower, kSystemUpper);
    for (int m = 0; m <= n; ++m) {
        const RowCoefficients rc =
            row_coefficients(k, coeffs.delta_window(m), problem.dt, problem.alpha, problem.theta);
        const auto row = static_cast<std::size_t>(2 * m);
        detail::place_row(a, row, m, n, detail::fold_if_boundary(u_row_lhs(rc), m, n, k));
        const bool boundary = (m == 0 || m == n);
        const StencilRow second =
            boundary ? closure_row(problem.boundary.closure, k) : v_row_lhs(k);
        detail::place_row(a, row + 1, m, n, detail::fold_if_boundary(second, m, n, k));
    }
    return a;
}

/// Right-hand matrix; independent of the state, so one assembly serves a run.
/// Closure rows are zero here and receive their data from closure_rhs().
inline BandedMatrix assemble_B(const KsProblem& problem) {
    const int n = problem.grid.intervals();
    const KnotConstants k = problem.constants();
    const RowCoefficients rc =
        row_coefficients(k, {0.0, 0.0, 0.0}, problem.dt, problem.alpha, problem.theta);
    BandedMatrix b(system_dim(problem.grid), kSystemLower, kSystemUpper);
    for (int m = 0; m <= n; ++m) {
        const auto row = static_cast<std::size_t>(2 * m);
        detail::place_row(b, row, m, n, detail::fold_if_boundary(u_row_rhs(rc), m, n, k));
        if (m != 0 && m != n) detail::place_row(b, row + 1, m, n, v_row_rhs(k));
    }
    return b;
}

/// Data for the two closure rows (zero elsewhere).
inline std::vector<double> closure_rhs(const KsProblem& problem) {
    std::vector<double> r(system_dim(problem.grid), 0.0);
    if (problem.boundary.closure == BoundaryClosure::dirichlet) {
        r[1] = problem.boundary.g0;
        r[r.size() - 1] = problem.boundary.g1;
    }
    return r;
}

/// (delta_0, phi_0, ..., delta_N, phi_N) without ghosts.
inline std::vector<double> interleave(const Coefficients& c) {
    const int n = c.intervals();
    std::vector<double> x(2 * static_cast<std::size_t>(n) + 2);
    for (int m = 0; m <= n; ++m) {
        x[2 * static_cast<std::size_t>(m)] = c.delta(m);
        x[2 * static_cast<std::size_t>(m) + 1] = c.phi(m);
    }
    return x;
}

/// Inverse of interleave; ghosts recovered from the constraints.
inline Coefficients deinterleave(std::span<const double> x, const KnotConstants& k) {
    const int n = static_cast<int>(x.size() / 2) - 1;
    Coefficients c(n);
    for (int m = 0; m <= n; ++m) {
        c.delta(m) = x[2 * static_cast<std::size_t>(m)];
        c.phi(m) = x[2 * static_cast<std::size_t>(m) + 1];
    }
    return recover_ghosts(std::move(c), k);
}

/// Residuals of the four ghost constraints (U_xx(a), V(a), U_xx(b), V(b)).
inline std::array<double, 4> ghost_constraint_residuals(const Coefficients& c, const KnotConstants& k) {
    const int n = c.intervals();
    return {nodal_values(c.delta_window(0), k).d2, nodal_values(c.phi_window(0), k).value,
            nodal_values(c.delta_window(n), k).d2, nodal_values(c.phi_window(n), k).value};
}

}  // namespace ctbks
