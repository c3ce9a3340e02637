#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pht {

// Uniform nodal grid function on [lo, hi]: n intervals, n+1 samples.
struct GridFunction {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> v;

    GridFunction() = default;
    GridFunction(double lo_, double hi_, std::vector<double> values)
        : lo(lo_), hi(hi_), v(std::move(values)) {
        if (v.size() < 3) throw std::invalid_argument("grid needs at least 2 intervals");
        if (!(hi > lo)) throw std::invalid_argument("grid interval is empty");
    }

    std::size_t n() const { return v.size() - 1; }
    double step() const { return (hi - lo) / static_cast<double>(n()); }
    double node(std::size_t j) const { return lo + step() * static_cast<double>(j); }

    // Piecewise-linear value at any t inside [lo, hi].
    double operator()(double t) const {
        const double h = step();
        double pos = (t - lo) / h;
        if (pos <= 0.0) return v.front();
        if (pos >= static_cast<double>(n())) return v.back();
        const auto i = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(i);
        return v[i] * (1.0 - w) + v[i + 1] * w;
    }
};

template <typename F>
GridFunction sample_grid(double lo, double hi, std::size_t n, F&& f) {
    std::vector<double> v(n + 1);
    const double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j) v[j] = f(lo + h * static_cast<double>(j));
    return GridFunction(lo, hi, std::move(v));
}

inline double trapz(const GridFunction& f) {
    const double h = f.step();
    double acc = 0.5 * (f.v.front() + f.v.back());
    for (std::size_t j = 1; j < f.n(); ++j) acc += f.v[j];
    return acc * h;
}

// Running trapezoid integral anchored at zero on the left end.
inline GridFunction cumtrapz(const GridFunction& f) {
    const double h = f.step();
    std::vector<double> out(f.v.size(), 0.0);
    for (std::size_t j = 1; j < f.v.size(); ++j)
        out[j] = out[j - 1] + 0.5 * h * (f.v[j - 1] + f.v[j]);
    return GridFunction(f.lo, f.hi, std::move(out));
}

// Central differences inside, second-order one-sided at the ends.
// Exact for quadratics, endpoints included.
inline GridFunction diff_nodal(const GridFunction& f) {
    const std::size_t n = f.n();
    if (n < 4) throw std::invalid_argument("diff_nodal needs at least 4 intervals");
    const double h = f.step();
    std::vector<double> d(n + 1);
    d[0] = (-3.0 * f.v[0] + 4.0 * f.v[1] - f.v[2]) / (2.0 * h);
    for (std::size_t j = 1; j < n; ++j) d[j] = (f.v[j + 1] - f.v[j - 1]) / (2.0 * h);
    d[n] = (3.0 * f.v[n] - 4.0 * f.v[n - 1] + f.v[n - 2]) / (2.0 * h);
    return GridFunction(f.lo, f.hi, std::move(d));
}

// Matrix forms of the two operators above, acting on nodal value vectors.
// They keep downstream linear-system assembly affine in the unknowns.
inline Eigen::MatrixXd diff_matrix(std::size_t n, double h) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
    D(0, 0) = -3.0 / (2.0 * h); D(0, 1) = 4.0 / (2.0 * h); D(0, 2) = -1.0 / (2.0 * h);
    for (std::size_t j = 1; j < n; ++j) {
        D(j, j - 1) = -1.0 / (2.0 * h);
        D(j, j + 1) = 1.0 / (2.0 * h);
    }
    D(n, n) = 3.0 / (2.0 * h); D(n, n - 1) = -4.0 / (2.0 * h); D(n, n - 2) = 1.0 / (2.0 * h);
    return D;
}

inline Eigen::MatrixXd cumtrapz_matrix(std::size_t n, double h) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        C.row(j) = C.row(j - 1);
        C(j, j - 1) += 0.5 * h;
        C(j, j) += 0.5 * h;
    }
    return C;
}

// Product-trapezoid weights for int_0^{y_j} f(eta) (y_j-eta)^{-1/2} d eta
// on the uniform grid eta_i = i*h: exact when f is piecewise linear.
// Weights are nonnegative and sum to 2*sqrt(y_j).
inline std::vector<double> product_weights_sqrt(std::size_t j, double h) {
    std::vector<double> w(j + 1, 0.0);
    for (std::size_t i = 0; i < j; ++i) {
        const double B = static_cast<double>(j - i) * h;
        const double A = static_cast<double>(j - i - 1) * h;
        const double sB = std::sqrt(B), sA = std::sqrt(A);
        const double m32 = (2.0 / 3.0) * (B * sB - A * sA);
        w[i]     += (m32 - 2.0 * A * (sB - sA)) / h;
        w[i + 1] += (2.0 * B * (sB - sA) - m32) / h;
    }
    return w;
}

}  // namespace pht
