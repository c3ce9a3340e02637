#pragma once

#include <cmath>
#include <stdexcept>

namespace pht {

inline constexpr double kPi = 3.14159265358979323846;

struct KernelConfig {
    int K = 8;             // image sum over n = -K..K
    double s_min = 1e-14;  // refuse direct evaluation below this time separation
};

struct KernelDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Both kernels are 2-periodic in their spatial argument, so the argument is
// reduced to [-1,1] before summing the image window. This makes the two
// Dirichlet wall cancellations exact for any K instead of leaving an
// O(e^{-K^2/s}) asymmetry from a shifted window.
inline double reduce2(double z) { return z - 2.0 * std::round(z / 2.0); }

inline double gauss_heat(double z, double s) {
    return std::exp(-z * z / (4.0 * s)) / (2.0 * std::sqrt(kPi * s));
}

inline double gauss_heat_dz(double z, double s) {
    return -z / (2.0 * s) * gauss_heat(z, s);
}

inline double theta_sum(double z, double s, int K) {
    const double zr = reduce2(z);
    double acc = 0.0;
    for (int n = -K; n <= K; ++n) acc += gauss_heat(zr + 2.0 * n, s);
    return acc;
}

inline double theta_sum_dz(double z, double s, int K) {
    const double zr = reduce2(z);
    double acc = 0.0;
    for (int n = -K; n <= K; ++n) acc += gauss_heat_dz(zr + 2.0 * n, s);
    return acc;
}

inline double require_s(double y, double eta, const KernelConfig& cfg) {
    const double s = y - eta;
    if (s < cfg.s_min)
        throw KernelDomainError("kernel evaluation needs y-eta >= s_min, got s=" +
                                std::to_string(s));
    return s;
}

}  // namespace detail

// Dirichlet heat kernel of the unit strip (difference of image sums).
// Vanishes at x=0 and x=1 up to roundoff.
inline double eval_gbar(double x, double y, double xi, double eta, const KernelConfig& cfg = {}) {
    const double s = detail::require_s(y, eta, cfg);
    return detail::theta_sum(x - xi, s, cfg.K) - detail::theta_sum(x + xi, s, cfg.K);
}

// Companion kernel with + between the image sums (Neumann-type).
inline double eval_n(double x, double y, double xi, double eta, const KernelConfig& cfg = {}) {
    const double s = detail::require_s(y, eta, cfg);
    return detail::theta_sum(x - xi, s, cfg.K) + detail::theta_sum(x + xi, s, cfg.K);
}

// Derivative of eval_gbar in its first spatial argument.
inline double eval_gbar_dx(double x, double y, double xi, double eta,
                           const KernelConfig& cfg = {}) {
    const double s = detail::require_s(y, eta, cfg);
    return detail::theta_sum_dz(x - xi, s, cfg.K) - detail::theta_sum_dz(x + xi, s, cfg.K);
}

// sqrt(s) * eval_n: the smooth factor left after extracting the (y-eta)^{-1/2}
// singularity. Defined for s = 0 by its limit, which counts how many of the
// two image families sit on the diagonal.
inline double eval_n_scaled(double x, double y, double xi, double eta,
                            const KernelConfig& cfg = {}) {
    const double s = y - eta;
    if (s < 0.0) throw KernelDomainError("eval_n_scaled needs y >= eta");
    if (s < cfg.s_min) {
        double acc = 0.0;
        if (detail::reduce2(x - xi) == 0.0) acc += 1.0;
        if (detail::reduce2(x + xi) == 0.0) acc += 1.0;
        return acc / (2.0 * std::sqrt(kPi));
    }
    return std::sqrt(s) * eval_n(x, y, xi, eta, cfg);
}

// Upper bound on the dropped image tail |sum_{|n|>K}| of either series.
// After argument reduction |z| <= 1, the nearest dropped image is at
// distance >= 2K-1, and the tail is dominated by a geometric series.
inline double truncation_bound(int K, double s) {
    if (K < 1 || !(s > 0.0)) throw std::invalid_argument("truncation_bound needs K>=1, s>0");
    const double d = 2.0 * K - 1.0;
    const double lead = std::exp(-d * d / (4.0 * s)) / (2.0 * std::sqrt(kPi * s));
    const double ratio = std::exp(-(2.0 * d + 1.0) / (4.0 * s));  // next-image decay factor
    return 2.0 * lead / (1.0 - std::min(ratio, 0.5));
}

}  // namespace pht
