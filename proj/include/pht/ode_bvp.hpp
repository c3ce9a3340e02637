#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pht/problem.hpp"
#include "pht/quadrature.hpp"

namespace pht {

// Green's function of tau'' - tau' = f with tau(0)=tau(1)=0:
// tau(x) = int_0^1 G(x,t) f(t) dt. Continuous, kink on the diagonal,
// nonpositive on the open square.
inline double greens_g(double x, double t) {
    static const double e1 = std::exp(1.0);
    const double lo = std::min(x, t), hi = std::max(x, t);
    return std::exp(-t) * (std::exp(lo) - 1.0) * (std::exp(hi) - e1) / (e1 - 1.0);
}

// Right side of the limit problem on y -> +0 of the square:
// r(t) = -(2 A(t/2))' with A = (a3 - a1 phi1)/a2 on the half grid.
// phi1 must be sampled on [0,1/2] with M+1 nodes (step h/2).
inline GridFunction ode_rhs(const GridFunction& phi1, const ValidatedProblem& vp) {
    const std::size_t M = phi1.n();
    std::vector<double> D(M + 1);
    for (std::size_t j = 0; j <= M; ++j) {
        const double th = phi1.node(j);
        D[j] = 2.0 * (vp.spec.a3(th) - vp.spec.a1(th) * phi1.v[j]) / vp.spec.a2(th);
    }
    GridFunction Dm(0.0, 1.0, std::move(D));  // viewed in the master variable t = 2*theta
    GridFunction r = diff_nodal(Dm);
    for (auto& x : r.v) x = -x;
    return r;
}

// Solves tau'' - tau' = r with tau(0)=alpha, tau(1)=beta by shifting off the
// straight line through the corners: tau = line + int G(x,t)[r(t) + beta-alpha]dt.
// Nodal trapezoid quadrature; the grid contains the kink node t = x_i, so the
// composite rule is split there automatically.
inline GridFunction solve_tau1_grid(const GridFunction& r, double alpha, double beta) {
    const std::size_t M = r.n();
    const double h = r.step();
    std::vector<double> out(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const double x = r.node(i);
        double acc = 0.0;
        for (std::size_t t = 0; t <= M; ++t) {
            const double w = (t == 0 || t == M) ? 0.5 : 1.0;
            acc += w * greens_g(x, r.node(t)) * (r.v[t] + (beta - alpha));
        }
        out[i] = alpha + (beta - alpha) * x + h * acc;
    }
    return GridFunction(0.0, 1.0, std::move(out));
}

inline GridFunction solve_tau1(const GridFunction& phi1, const ValidatedProblem& vp) {
    const GridFunction r = ode_rhs(phi1, vp);
    for (double x : r.v)
        if (!std::isfinite(x)) throw std::runtime_error("non-finite right side in the limit problem");
    return solve_tau1_grid(r, vp.corners.tau1_at_0, vp.corners.tau1_at_1);
}

// Independent oracle: central-difference discretization of the same problem,
// tridiagonal Thomas solve.
inline GridFunction fd_bvp_solve(const GridFunction& r, double alpha, double beta) {
    const std::size_t M = r.n();
    if (M < 2) throw std::invalid_argument("fd_bvp_solve needs at least 2 intervals");
    const double h = r.step();
    // interior unknowns j=1..M-1:  (1/h^2 + 1/2h) u_{j-1} - 2/h^2 u_j + (1/h^2 - 1/2h) u_{j+1} = r_j
    const double lo_c = 1.0 / (h * h) + 1.0 / (2.0 * h);
    const double di_c = -2.0 / (h * h);
    const double up_c = 1.0 / (h * h) - 1.0 / (2.0 * h);
    const std::size_t n = M - 1;
    std::vector<double> cp(n), dp(n);
    double rhs0 = r.v[1] - lo_c * alpha;
    cp[0] = up_c / di_c;
    dp[0] = rhs0 / di_c;
    for (std::size_t j = 1; j < n; ++j) {
        double rhs = r.v[j + 1];
        if (j == n - 1) rhs -= up_c * beta;
        const double den = di_c - lo_c * cp[j - 1];
        if (den == 0.0) throw std::runtime_error("tridiagonal pivot vanished");
        cp[j] = up_c / den;
        dp[j] = (rhs - lo_c * dp[j - 1]) / den;
    }
    std::vector<double> u(M + 1);
    u[0] = alpha;
    u[M] = beta;
    u[M - 1] = dp[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) u[j + 1] = dp[j] - cp[j] * u[j + 2];
    return GridFunction(0.0, 1.0, std::move(u));
}

}  // namespace pht
