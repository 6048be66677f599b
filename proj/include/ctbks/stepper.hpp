#pragma once

#include "ctbks/banded.hpp"
#include "ctbks/scheme.hpp"
#include "ctbks/trig_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbks {

enum class InitMode {
    function_fit,  ///< U(x_i) = u0(x_i) at every knot, U_xx = 0 at both ends
    uxx_fit,       ///< U_xx(x_i) = u0''(x_i) at interior knots, U = u0 at the ends
};

/// Raised when a run cannot continue: singular step matrix, non-finite
/// values, or a singular initial fit.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::int64_t level, double time)
        : std::runtime_error(what), level_(level), time_(time) {}

    std::int64_t level() const noexcept { return level_; }
    double time() const noexcept { return time_; }

private:
    std::int64_t level_;
    double time_;
};

/// Fourth-order second derivative with step s; one-sided at the domain ends.
inline double second_derivative_fd(const ScalarFunction& f, double x, double s, int side = 0) {
    if (side == 0) {
        return (-f(x + 2 * s) + 16.0 * f(x + s) - 30.0 * f(x) + 16.0 * f(x - s) - f(x - 2 * s)) /
               (12.0 * s * s);
    }
    const double d = side > 0 ? s : -s;
    return (45.0 * f(x) - 154.0 * f(x + d) + 214.0 * f(x + 2 * d) - 156.0 * f(x + 3 * d) +
            61.0 * f(x + 4 * d) - 10.0 * f(x + 5 * d)) /
           (12.0 * s * s);
}

/// u0'' at the knots, from initial_v when given, else finite differences
/// with step h/10.
inline std::vector<double> initial_curvature(const KsProblem& problem) {
    const UniformGrid& g = problem.grid;
    const int n = g.intervals();
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    const double s = g.spacing() / 10.0;
    for (int i = 0; i <= n; ++i) {
        const double x = g.knot(i);
        if (problem.initial_v) {
            v[static_cast<std::size_t>(i)] = (*problem.initial_v)(x);
        } else {
            const int side = i == 0 ? 1 : (i == n ? -1 : 0);
            v[static_cast<std::size_t>(i)] = second_derivative_fd(problem.initial_u, x, s, side);
        }
    }
    return v;
}

namespace detail {

// Solve a tridiagonal fit over the N+1 non-ghost coefficients. `end_row`
// is the end condition, `interior` the stencil matched at interior knots,
// both over (c_{m-1}, c_m, c_{m+1}); ghost elimination uses c_{-1} =
// -ratio*c_0 - c_1 and its mirror.
inline std::vector<double> fit_tridiagonal(int n, const std::array<double, 3>& end_row,
                                           double end_left, double end_right,
                                           const std::array<double, 3>& interior,
                                           const std::vector<double>& targets, double ghost_ratio,
                                           const char* what, double h) {
    const auto dim = static_cast<std::size_t>(n) + 1;
    BandedMatrix m(dim, 1, 1);
    m.set(0, 0, end_row[1] - end_row[0] * ghost_ratio);
    m.set(0, 1, end_row[2] - end_row[0]);
    m.set(dim - 1, dim - 1, end_row[1] - end_row[2] * ghost_ratio);
    m.set(dim - 1, dim - 2, end_row[0] - end_row[2]);
    std::vector<double> rhs(dim, 0.0);
    rhs[0] = end_left;
    rhs[dim - 1] = end_right;
    for (std::size_t i = 1; i + 1 < dim; ++i) {
        m.set(i, i - 1, interior[0]);
        m.set(i, i, interior[1]);
        m.set(i, i + 1, interior[2]);
        rhs[i] = targets[i];
    }
    try {
        return lu_factor(m).solve(rhs);
    } catch (const SingularMatrixError& e) {
        throw SolverError(std::string("singular initial fit (") + what + ", h = " + std::to_string(h) +
                              "): " + e.what(),
                          0, 0.0);
    }
}

}  // namespace detail

/// Initial spline parameters.
///
/// phi: V(x_i) = u0''(x_i) at interior knots, with V = 0 and V_xx = 0 at
/// both ends (V = 0 is the ghost constraint; V_xx = 0 closes the system).
/// delta: per `mode`, always honouring U_xx = 0 at both ends.
inline Coefficients fit_initial(const KsProblem& problem, InitMode mode = InitMode::function_fit) {
    problem.validate();
    const UniformGrid& g = problem.grid;
    const int n = g.intervals();
    const KnotConstants k = problem.constants();
    const std::array<double, 3> value_stencil{k.alpha1, k.alpha2, k.alpha1};
    const std::array<double, 3> curvature_stencil{k.gamma1, k.gamma2, k.gamma1};
    const double delta_ratio = k.gamma2 / k.gamma1;
    const double phi_ratio = k.alpha2 / k.alpha1;

    const std::vector<double> v0 = initial_curvature(problem);
    std::vector<double> u0(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) u0[static_cast<std::size_t>(i)] = problem.initial_u(g.knot(i));

    std::vector<double> delta;
    if (mode == InitMode::function_fit) {
        delta = detail::fit_tridiagonal(n, value_stencil, u0.front(), u0.back(), value_stencil, u0,
                                        delta_ratio, "function-fit", g.spacing());
    } else {
        delta = detail::fit_tridiagonal(n, value_stencil, u0.front(), u0.back(), curvature_stencil, v0,
                                        delta_ratio, "uxx-fit", g.spacing());
    }
    const std::vector<double> phi = detail::fit_tridiagonal(
        n, curvature_stencil, 0.0, 0.0, value_stencil, v0, phi_ratio, "curvature", g.spacing());

    Coefficients c(n);
    for (int i = 0; i <= n; ++i) {
        c.delta(i) = delta[static_cast<std::size_t>(i)];
        c.phi(i) = phi[static_cast<std::size_t>(i)];
    }
    return recover_ghosts(std::move(c), k);
}

struct SolverState {
    std::int64_t level = 0;
    double time = 0.0;
    Coefficients coeffs;
};

/// Knot values U_i and V_i for i = 0..N.
struct KnotField {
    std::vector<double> u;
    std::vector<double> v;
};

inline KnotField knot_field(const Coefficients& c, const KnotConstants& k) {
    const int n = c.intervals();
    KnotField f;
    f.u.resize(static_cast<std::size_t>(n) + 1);
    f.v.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        f.u[static_cast<std::size_t>(i)] = nodal_values(c.delta_window(i), k).value;
        f.v[static_cast<std::size_t>(i)] = nodal_values(c.phi_window(i), k).value;
    }
    return f;
}

/// V_i - (U_xx)_i at every knot.
inline std::vector<double> constraint_residual(const Coefficients& c, const KnotConstants& k) {
    const int n = c.intervals();
    std::vector<double> r(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        r[static_cast<std::size_t>(i)] =
            nodal_values(c.phi_window(i), k).value - nodal_values(c.delta_window(i), k).d2;
    }
    return r;
}

/// Advances a KS problem one linearized Crank-Nicolson level at a time.
/// B and the closure data are assembled once; A is rebuilt every step from
/// the level-n coefficients.
class Stepper {
public:
    explicit Stepper(KsProblem problem, Pivoting pivoting = Pivoting::partial)
        : problem_(std::move(problem)),
          constants_((problem_.validate(), problem_.constants())),
          pivoting_(pivoting),
          b_(assemble_B(problem_)),
          closure_(closure_rhs(problem_)) {}

    const KsProblem& problem() const noexcept { return problem_; }
    const KnotConstants& constants() const noexcept { return constants_; }
    const BandedMatrix& rhs_matrix() const noexcept { return b_; }

    SolverState initial_state(InitMode mode = InitMode::function_fit) const {
        return {0, 0.0, fit_initial(problem_, mode)};
    }

    SolverState step(const SolverState& state) const {
        const std::int64_t next = state.level + 1;
        const double t_next = static_cast<double>(next) * problem_.dt;

        const BandedMatrix a = assemble_A(problem_, state.coeffs);
        std::vector<double> rhs = b_.multiply(interleave(state.coeffs));
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += closure_[i];

        std::vector<double> x;
        try {
            x = lu_factor(a, pivoting_).solve(rhs);
        } catch (const SingularMatrixError& e) {
            throw SolverError("step " + std::to_string(next) + ": " + e.what(), next, t_next);
        }
        for (double value : x) {
            if (!std::isfinite(value)) {
                throw SolverError("non-finite coefficient at t = " + std::to_string(t_next), next,
                                  t_next);
            }
        }
        return {next, t_next, deinterleave(x, constants_)};
    }

private:
    KsProblem problem_;
    KnotConstants constants_;
    Pivoting pivoting_;
    BandedMatrix b_;
    std::vector<double> closure_;
};

struct Snapshot {
    double time = 0.0;
    std::int64_t level = 0;
    KnotField field;
};

struct Trajectory {
    std::vector<double> cadence;  ///< requested snapshot times
    std::vector<Snapshot> snapshots;
    std::int64_t steps_taken = 0;
    double max_abs_u = 0.0;  ///< over every level, not just snapshots
};

/// Number of steps needed to reach t_end.
inline std::int64_t step_count(double t_end, double dt) {
    return static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
}

/// Run into an existing trajectory so partial results survive a SolverError.
/// The fitted initial state is always recorded; each requested time maps to
/// the nearest step level.
inline void run_into(Trajectory& out, const Stepper& stepper, double t_end,
                     const std::vector<double>& snapshot_times,
                     InitMode mode = InitMode::function_fit,
                     const std::function<void(const SolverState&)>& on_step = {}) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("run: t_end must be nonnegative");
    const double dt = stepper.problem().dt;
    const std::int64_t total = step_count(t_end, dt);

    std::vector<std::int64_t> wanted;
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_end + 0.5 * dt) {
            throw std::invalid_argument("run: snapshot time " + std::to_string(t) +
                                        " outside [0, t_end]");
        }
        const auto lvl = static_cast<std::int64_t>(std::llround(t / dt));
        if (lvl > 0) wanted.push_back(lvl);
    }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    out.cadence = snapshot_times;

    const KnotConstants& k = stepper.constants();
    auto record = [&](const SolverState& s) {
        out.snapshots.push_back({s.time, s.level, knot_field(s.coeffs, k)});
    };
    auto track = [&](const SolverState& s) {
        for (int i = 0; i <= s.coeffs.intervals(); ++i) {
            out.max_abs_u =
                std::max(out.max_abs_u, std::abs(nodal_values(s.coeffs.delta_window(i), k).value));
        }
    };

    SolverState state = stepper.initial_state(mode);
    track(state);
    record(state);
    if (on_step) on_step(state);
    auto next_wanted = wanted.begin();
    for (std::int64_t n = 0; n < total; ++n) {
        state = stepper.step(state);
        out.steps_taken = state.level;
        track(state);
        if (on_step) on_step(state);
        if (next_wanted != wanted.end() && *next_wanted == state.level) {
            record(state);
            ++next_wanted;
        }
    }
}

inline Trajectory run(const KsProblem& problem, double t_end, const std::vector<double>& snapshot_times,
                      InitMode mode = InitMode::function_fit, Pivoting pivoting = Pivoting::partial) {
    Trajectory t;
    run_into(t, Stepper(problem, pivoting), t_end, snapshot_times, mode);
    return t;
}

}  // namespace ctbks
