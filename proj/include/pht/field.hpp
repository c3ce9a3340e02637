#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pht/kernels.hpp"
#include "pht/quadrature.hpp"
#include "pht/traces.hpp"

namespace pht {

// Subdomains of the mixed-type domain: the unit square plus three wave
// triangles hanging off its bottom, left, and right edges.
enum class Subdomain { Omega0, Omega1, Omega2, Omega3, LineAB, LineAA0, LineBB0, Outside };

inline Subdomain classify_subdomain(double x, double y) {
    const double tol = 1e-12;
    if (x > tol && x < 1.0 - tol && y > tol && y < 1.0 - tol) return Subdomain::Omega0;
    if (std::abs(y) <= tol && x >= -tol && x <= 1.0 + tol) return Subdomain::LineAB;
    if (std::abs(x) <= tol && y >= -tol && y <= 1.0 + tol) return Subdomain::LineAA0;
    if (std::abs(x - 1.0) <= tol && y >= -tol && y <= 1.0 + tol) return Subdomain::LineBB0;
    if (x > 0.0 && x < 1.0 && y < 0.0 && y > std::max(-x, x - 1.0)) return Subdomain::Omega1;
    if (x < 0.0 && x > -0.5 && y > -x && y < x + 1.0) return Subdomain::Omega2;
    if (x > 1.0 && x < 1.5 && y > x - 1.0 && y < 2.0 - x) return Subdomain::Omega3;
    return Subdomain::Outside;
}

// d'Alembert evaluators. Each triangle is the Cauchy fan of one wall:
// Omega1 from (tau1, nu1) on y=0, Omega2 from (tau2, nu2) on x=0,
// Omega3 from (tau3, nu3) on x=1. Traces are read piecewise-linearly and
// the transversal integral by running trapezoid on the trace grid.
// The evaluators accept the closed triangles: the nonlocal conditions probe
// points on the characteristic edges themselves.
namespace detail {

inline double trace_integral(const GridFunction& cum, double a, double b) {
    return cum(b) - cum(a);
}

constexpr double kGeomTol = 1e-9;

}  // namespace detail

inline double eval_omega1(const TraceSet& tr, double x, double y) {
    const double e = detail::kGeomTol;
    if (!(x >= -e && x <= 1.0 + e && y <= e && y >= std::max(-x, x - 1.0) - e))
        throw std::domain_error("point outside the lower wave triangle");
    const GridFunction cum = cumtrapz(tr.nu1);
    return 0.5 * (tr.tau1(x + y) + tr.tau1(x - y)) +
           0.5 * detail::trace_integral(cum, x - y, x + y);
}

inline double eval_omega2(const TraceSet& tr, double x, double y) {
    const double e = detail::kGeomTol;
    if (!(x >= -0.5 - e && x <= e && y >= -x - e && y <= x + 1.0 + e))
        throw std::domain_error("point outside the left wave triangle");
    const GridFunction cum = cumtrapz(tr.nu2);
    return 0.5 * (tr.tau2(y + x) + tr.tau2(y - x)) +
           0.5 * detail::trace_integral(cum, y - x, y + x);
}

inline double eval_omega3(const TraceSet& tr, double x, double y) {
    const double e = detail::kGeomTol;
    if (!(x >= 1.0 - e && x <= 1.5 + e && y >= x - 1.0 - e && y <= 2.0 - x + e))
        throw std::domain_error("point outside the right wave triangle");
    const GridFunction cum = cumtrapz(tr.nu3);
    const double r = x - 1.0;
    return 0.5 * (tr.tau3(y + r) + tr.tau3(y - r)) +
           0.5 * detail::trace_integral(cum, y - r, y + r);
}

// Uniform 2D sample of the square: u(i*hx, j*hy) at vu[j*(nx+1)+i].
struct Field2D {
    std::size_t nx = 0, ny = 0;
    std::vector<double> vu;
    double at(std::size_t i, std::size_t j) const { return vu[j * (nx + 1) + i]; }
    double& at(std::size_t i, std::size_t j) { return vu[j * (nx + 1) + i]; }
    // bilinear read at interior coordinates
    double operator()(double x, double y) const {
        const double px = std::min(std::max(x * nx, 0.0), double(nx));
        const double py = std::min(std::max(y * ny, 0.0), double(ny));
        auto i = std::min(static_cast<std::size_t>(px), nx - 1);
        auto j = std::min(static_cast<std::size_t>(py), ny - 1);
        const double fx = px - double(i), fy = py - double(j);
        return at(i, j) * (1 - fx) * (1 - fy) + at(i + 1, j) * fx * (1 - fy) +
               at(i, j + 1) * (1 - fx) * fy + at(i + 1, j + 1) * fx * fy;
    }
};

// Crank-Nicolson march of u_y = u_xx on the unit square with Dirichlet
// sides tau2 (x=0), tau3 (x=1) and initial row tau1. Thomas solve per step.
inline Field2D heat_field_cn(const GridFunction& tau1, const GridFunction& tau2,
                             const GridFunction& tau3, std::size_t nx, std::size_t ny) {
    if (nx < 16 || ny < 16) throw std::invalid_argument("heat_field_cn needs nx, ny >= 16");
    const double hx = 1.0 / static_cast<double>(nx);
    const double hy = 1.0 / static_cast<double>(ny);
    const double r = hy / (2.0 * hx * hx);
    Field2D F;
    F.nx = nx;
    F.ny = ny;
    F.vu.assign((nx + 1) * (ny + 1), 0.0);
    for (std::size_t i = 0; i <= nx; ++i) F.at(i, 0) = tau1(hx * static_cast<double>(i));

    const std::size_t n = nx - 1;
    std::vector<double> cp(n), dp(n), rhs(n);
    for (std::size_t step = 0; step < ny; ++step) {
        const double ynext = hy * static_cast<double>(step + 1);
        for (std::size_t i = 1; i < nx; ++i)
            rhs[i - 1] = r * F.at(i - 1, step) + (1.0 - 2.0 * r) * F.at(i, step) +
                         r * F.at(i + 1, step);
        rhs[0] += r * tau2(ynext);
        rhs[n - 1] += r * tau3(ynext);
        const double b = 1.0 + 2.0 * r, a = -r, c = -r;
        cp[0] = c / b;
        dp[0] = rhs[0] / b;
        for (std::size_t i = 1; i < n; ++i) {
            const double den = b - a * cp[i - 1];
            cp[i] = c / den;
            dp[i] = (rhs[i] - a * dp[i - 1]) / den;
        }
        F.at(0, step + 1) = tau2(ynext);
        F.at(nx, step + 1) = tau3(ynext);
        F.at(nx - 1, step + 1) = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            F.at(i + 1, step + 1) = dp[i] - cp[i] * F.at(i + 2, step + 1);
    }
    return F;
}

namespace detail {

// erfc(zeta / 2 sqrt(s)) with its s -> 0+ limit; the building block of the
// exactly integrated lateral heat potentials.
inline double erfc_scaled(double zeta, double s) {
    if (s <= 0.0) return zeta > 0.0 ? 0.0 : (zeta < 0.0 ? 2.0 : 1.0);
    return std::erfc(zeta / (2.0 * std::sqrt(s)));
}

// Antiderivative in s of erfc_scaled; its s -> 0+ limit is zeta^2 for
// negative zeta (erfc saturates at 2 there), else 0.
inline double erfc_antiderivative(double zeta, double s) {
    if (s <= 0.0) return zeta < 0.0 ? zeta * zeta : 0.0;
    return (s + 0.5 * zeta * zeta) * erfc_scaled(zeta, s) -
           (zeta / std::sqrt(kPi)) * std::sqrt(s) * std::exp(-zeta * zeta / (4.0 * s));
}

// One lateral wall potential: sum over images of
// int_0^y dE/ds(zeta, s) tau(y-s) ds with tau piecewise linear on its grid,
// each cell integrated exactly by parts. Equals
// int_0^y Gbar_xi(x,y,wall,eta) tau(eta) d eta for the matching wall.
inline double lateral_potential(double zred, double y, const GridFunction& tau, int K) {
    double total = 0.0;
    const double h = tau.step();
    const auto full = static_cast<std::size_t>(std::floor(y / h + 1e-12));
    for (int n = -K; n <= K; ++n) {
        const double zeta = zred + 2.0 * n;
        double acc = 0.0;
        auto cell = [&](double e0, double e1, double t0, double t1) {
            if (e1 <= e0) return;
            const double lam = (t1 - t0) / (e1 - e0);
            const double s0 = y - e1, s1 = y - e0;
            acc += erfc_scaled(zeta, s1) * t0 - erfc_scaled(zeta, s0) * t1 +
                   lam * (erfc_antiderivative(zeta, s1) - erfc_antiderivative(zeta, s0));
        };
        for (std::size_t i = 0; i < full; ++i) {
            const double e0 = h * static_cast<double>(i);
            cell(e0, e0 + h, tau.v[i], tau.v[i + 1]);
        }
        const double elast = h * static_cast<double>(full);
        if (y > elast) cell(elast, y, tau(elast), tau(y));
        total += acc;
    }
    return total;
}

}  // namespace detail

// Heat field from its boundary representation: initial-trace integral against
// the Dirichlet kernel plus the two lateral wall potentials. The initial
// integral uses per-cell 2-point Gauss on the piecewise-linear trace; the
// lateral potentials are integrated exactly per cell.
inline double heat_field_kernel(const GridFunction& tau1, const GridFunction& tau2,
                                const GridFunction& tau3, double x, double y,
                                const KernelConfig& cfg = {}) {
    if (!(y >= 10.0 * cfg.s_min)) throw KernelDomainError("heat_field_kernel needs y above s_min");
    const std::size_t n = tau1.n();
    const double h = tau1.step();
    const double g1 = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
    const double g2 = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
    double init = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = h * static_cast<double>(i);
        for (double g : {g1, g2}) {
            const double xi = a + h * g;
            init += 0.5 * h * eval_gbar(x, y, xi, 0.0, cfg) * tau1(xi);
        }
    }
    const double lat2 = detail::lateral_potential(detail::reduce2(x), y, tau2, cfg.K);
    const double lat3 = detail::lateral_potential(detail::reduce2(x - 1.0), y, tau3, cfg.K);
    return init + lat2 - lat3;
}

}  // namespace pht
