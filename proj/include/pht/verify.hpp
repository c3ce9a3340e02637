#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pht/field.hpp"
#include "pht/problem.hpp"
#include "pht/traces.hpp"

namespace pht {

// A manufactured solution: a field that is exact in every subdomain, the
// coefficient triples it satisfies, and all of its wall and characteristic
// traces in closed form. These are the solver's ground truth.
struct MmsCase {
    std::string name;
    // a1, a2, a3, b1, b2, b3, c1, c2, c3 as expression strings
    std::array<std::string, 9> coeff;
    std::function<double(double, double)> u0, u1, u2, u3;
    std::function<double(double)> tau1, nu1, tau2, nu2, tau3, nu3;
    std::function<double(double)> phi1, phi2, phi3, p, q;

    ProblemSpec problem(std::size_t M = 64, int K = 8) const {
        ProblemSpec s;
        s.a1 = parse_scalar_func(coeff[0]);
        s.a2 = parse_scalar_func(coeff[1]);
        s.a3 = parse_scalar_func(coeff[2]);
        s.b1 = parse_scalar_func(coeff[3]);
        s.b2 = parse_scalar_func(coeff[4]);
        s.b3 = parse_scalar_func(coeff[5]);
        s.c1 = parse_scalar_func(coeff[6]);
        s.c2 = parse_scalar_func(coeff[7]);
        s.c3 = parse_scalar_func(coeff[8]);
        s.M = M;
        s.K = K;
        return s;
    }

    // Field value anywhere in the closed mixed domain, dispatching by region.
    double u(double x, double y) const {
        const double e = 1e-12;
        if (x >= -e && x <= 1.0 + e && y >= -e && y <= 1.0 + e) return u0(x, y);
        if (y <= e && x >= -e && x <= 1.0 + e && y >= std::max(-x, x - 1.0) - e) return u1(x, y);
        if (x <= e && x >= -0.5 - e && y >= -x - e && y <= x + 1.0 + e) return u2(x, y);
        if (x >= 1.0 - e && x <= 1.5 + e && y >= x - 1.0 - e && y <= 2.0 - x + e)
            return u3(x, y);
        throw std::domain_error("point outside the mixed domain");
    }
};

// Coefficient note: within each condition the pair (first, second coefficient)
// is kept non-proportional across conditions. When all three ratios coincide
// (for instance all coefficients equal to one) the continuous problem itself
// admits a nonzero null solution and the discrete system is singular by
// construction; the solver reports that through its conditioning guard.
inline std::vector<MmsCase> mms_catalog() {
    std::vector<MmsCase> cs;
    {
        MmsCase c;
        c.name = "constant";
        c.coeff = {"1", "2+t", "3+t", "1", "2+t", "3+t", "1", "2+t", "0"};
        c.u0 = [](double, double) { return 1.0; };
        c.u1 = c.u0;
        c.u2 = c.u0;
        c.u3 = c.u0;
        c.tau1 = [](double) { return 1.0; };
        c.nu1 = [](double) { return 0.0; };
        c.tau2 = c.tau1;
        c.nu2 = c.nu1;
        c.tau3 = c.tau1;
        c.nu3 = c.nu1;
        c.phi1 = [](double) { return 1.0; };
        c.phi2 = [](double) { return 1.0; };
        c.phi3 = [](double) { return 0.0; };
        c.p = [](double) { return 0.0; };
        c.q = [](double) { return 0.0; };
        cs.push_back(std::move(c));
    }
    {
        MmsCase c;
        c.name = "linear";
        c.coeff = {"1", "2+t", "t+t^2", "1", "2+t", "4+t-t^2", "1", "2+t", "3+t"};
        c.u0 = [](double x, double) { return x; };
        c.u1 = c.u0;
        c.u2 = c.u0;
        c.u3 = c.u0;
        c.tau1 = [](double x) { return x; };
        c.nu1 = [](double) { return 0.0; };
        c.tau2 = [](double) { return 0.0; };
        c.nu2 = [](double) { return 1.0; };
        c.tau3 = [](double) { return 1.0; };
        c.nu3 = [](double) { return 1.0; };
        c.phi1 = [](double t) { return -t; };
        c.phi2 = [](double s) { return 2.0 - s; };
        c.phi3 = [](double) { return 1.0; };
        c.p = [](double) { return -1.0; };
        c.q = [](double) { return 1.0; };
        cs.push_back(std::move(c));
    }
    {
        MmsCase c;
        c.name = "quadratic";
        c.coeff = {"1", "2+t", "2*t^3+2*t^2-2*t",
                   "1", "2+t", "9-3*t-2*t^2",
                   "1", "2+t", "2"};
        c.u0 = [](double x, double y) { return x * x + 2.0 * y; };
        c.u1 = [](double x, double y) { return x * x + y * y + 2.0 * y; };
        c.u2 = [](double, double y) { return 2.0 * y; };
        c.u3 = [](double x, double y) { return 2.0 * x + 2.0 * y - 1.0; };
        c.tau1 = [](double x) { return x * x; };
        c.nu1 = [](double) { return 2.0; };
        c.tau2 = [](double y) { return 2.0 * y; };
        c.nu2 = [](double) { return 0.0; };
        c.tau3 = [](double y) { return 1.0 + 2.0 * y; };
        c.nu3 = [](double) { return 2.0; };
        c.phi1 = [](double t) { return 2.0 * t; };
        c.phi2 = [](double s) { return 5.0 - 4.0 * s; };
        c.phi3 = [](double) { return 0.0; };
        c.p = [](double) { return 2.0; };
        c.q = [](double) { return 0.0; };
        cs.push_back(std::move(c));
    }
    return cs;
}

inline MmsCase mms_case(const std::string& name) {
    for (auto& c : mms_catalog())
        if (c.name == name) return c;
    throw std::invalid_argument("unknown manufactured case: " + name);
}

// Exact traces sampled onto the solver's grids (for oracle comparisons and
// for feeding the residual checks an exact field).
inline TraceSet exact_traces(const MmsCase& c, std::size_t M) {
    TraceSet tr;
    tr.tau1 = sample_grid(0.0, 1.0, M, c.tau1);
    tr.nu1 = sample_grid(0.0, 1.0, M, c.nu1);
    tr.tau2 = sample_grid(0.0, 1.0, M, c.tau2);
    tr.nu2 = sample_grid(0.0, 1.0, M, c.nu2);
    tr.tau3 = sample_grid(0.0, 1.0, M, c.tau3);
    tr.nu3 = sample_grid(0.0, 1.0, M, c.nu3);
    return tr;
}

inline CharacteristicData exact_chars(const MmsCase& c, std::size_t M) {
    CharacteristicData ch;
    ch.phi1 = sample_grid(0.0, 0.5, M, c.phi1);
    ch.phi2 = sample_grid(0.5, 1.0, M, c.phi2);
    ch.phi3 = sample_grid(0.5, 1.0, M, c.phi3);
    return ch;
}

// Sup-norm errors of a solve against the exact case, in the fixed column
// order used by convergence tables.
inline constexpr std::array<const char*, 9> kTraceErrorNames = {
    "tau1", "nu1", "tau2", "nu2", "tau3", "nu3", "phi1", "phi2", "phi3"};

inline std::array<double, 9> trace_errors(const Solution& sol, const MmsCase& c) {
    auto sup = [](const GridFunction& g, const std::function<double(double)>& f) {
        double m = 0.0;
        for (std::size_t j = 0; j < g.v.size(); ++j)
            m = std::max(m, std::abs(g.v[j] - f(g.node(j))));
        return m;
    };
    return {sup(sol.traces.tau1, c.tau1), sup(sol.traces.nu1, c.nu1),
            sup(sol.traces.tau2, c.tau2), sup(sol.traces.nu2, c.nu2),
            sup(sol.traces.tau3, c.tau3), sup(sol.traces.nu3, c.nu3),
            sup(sol.chars.phi1, c.phi1),  sup(sol.chars.phi2, c.phi2),
            sup(sol.chars.phi3, c.phi3)};
}

// Residual magnitudes of the three nonlocal conditions and the two interface
// checks. Ops fill the parts they measure and leave the rest at zero.
struct ResidualReport {
    double res2_max = 0.0, res2_l2 = 0.0;
    double res3_max = 0.0, res3_l2 = 0.0;
    double res4_max = 0.0, res4_l2 = 0.0;
    double iface_u_max = 0.0, iface_du_max = 0.0;
};

// Evaluates the three nonlocal conditions on the reconstructed wave fields.
// Field values come from the d'Alembert evaluators; the characteristic
// derivatives in the third condition come from the closed single-argument
// forms (u_x+u_y on the left characteristic is tau2' + nu2 at y+x, and
// u_x-u_y on the right one is -tau3' + nu3 at y-x+1), never from 2D
// differencing.
inline ResidualReport residual_nonlocal(const TraceSet& tr, const ValidatedProblem& vp,
                                        std::size_t n_probe = 65) {
    if (n_probe < 3) throw std::invalid_argument("residual_nonlocal needs n_probe >= 3");
    const ProblemSpec& s = vp.spec;
    const GridFunction tau2p = diff_nodal(tr.tau2);
    const GridFunction tau3p = diff_nodal(tr.tau3);
    ResidualReport rep;
    auto accumulate = [&](double r, double w, double& mx, double& l2) {
        mx = std::max(mx, std::abs(r));
        l2 += w * r * r;
    };
    const double dt = 0.5 / static_cast<double>(n_probe - 1);
    for (std::size_t i = 0; i < n_probe; ++i) {
        const double w = (i == 0 || i + 1 == n_probe) ? 0.5 * dt : dt;
        const double t = 0.5 * static_cast<double>(i) / static_cast<double>(n_probe - 1);
        const double r2 =
            s.a1(t) * eval_omega2(tr, -t, t) + s.a2(t) * eval_omega1(tr, t, -t) - s.a3(t);
        accumulate(r2, w, rep.res2_max, rep.res2_l2);

        const double tb = 0.5 + t;
        const double r3 = s.b1(tb) * eval_omega1(tr, tb, tb - 1.0) +
                          s.b2(tb) * eval_omega3(tr, 2.0 - tb, 1.0 - tb) - s.b3(tb);
        accumulate(r3, w, rep.res3_max, rep.res3_l2);

        const double z = 2.0 * tb - 1.0;
        const double r4 = s.c1(tb) * (tau2p(z) + tr.nu2(z)) +
                          s.c2(tb) * (-tau3p(z) + tr.nu3(z)) - s.c3(tb);
        accumulate(r4, w, rep.res4_max, rep.res4_l2);
    }
    rep.res2_l2 = std::sqrt(rep.res2_l2);
    rep.res3_l2 = std::sqrt(rep.res3_l2);
    rep.res4_l2 = std::sqrt(rep.res4_l2);
    return rep;
}

// Measures the gluing across the three type-change lines: the square-side
// field u0 against the wall traces and, through one-sided three-point
// differencing with step delta, its normal derivatives against nu1, nu2,
// nu3; the wave sides are differenced the same way through the d'Alembert
// evaluators. Probes stay delta-aligned so grid-sampled fields are read at
// their own nodes.
inline ResidualReport interface_continuity(const std::function<double(double, double)>& u0,
                                           const TraceSet& tr, std::size_t n_probe,
                                           double delta) {
    if (!(delta > 0.0) || delta > 0.125)
        throw std::invalid_argument("interface_continuity needs 0 < delta <= 1/8");
    ResidualReport rep;
    auto fd3 = [&](double f0, double f1, double f2) {
        return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * delta);
    };
    const auto cells = static_cast<std::size_t>(std::llround(1.0 / delta));
    std::vector<double> probes;
    for (std::size_t k = 2; k + 2 <= cells; ++k) probes.push_back(delta * static_cast<double>(k));
    if (probes.empty()) throw std::invalid_argument("delta leaves no interior probes");
    const std::size_t stride = std::max<std::size_t>(1, probes.size() / std::max<std::size_t>(n_probe, 1));

    for (std::size_t k = 0; k < probes.size(); k += stride) {
        const double g = probes[k];
        // across y = 0
        rep.iface_u_max = std::max({rep.iface_u_max, std::abs(u0(g, 0.0) - tr.tau1(g)),
                                    std::abs(eval_omega1(tr, g, 0.0) - tr.tau1(g))});
        const double dy_sq = fd3(u0(g, 0.0), u0(g, delta), u0(g, 2.0 * delta));
        const double dy_wv = fd3(eval_omega1(tr, g, 0.0), eval_omega1(tr, g, -delta),
                                 eval_omega1(tr, g, -2.0 * delta));
        rep.iface_du_max = std::max({rep.iface_du_max, std::abs(dy_sq - tr.nu1(g)),
                                     std::abs(-dy_wv - tr.nu1(g))});
        // across x = 0
        rep.iface_u_max = std::max({rep.iface_u_max, std::abs(u0(0.0, g) - tr.tau2(g)),
                                    std::abs(eval_omega2(tr, 0.0, g) - tr.tau2(g))});
        const double dx_sq = fd3(u0(0.0, g), u0(delta, g), u0(2.0 * delta, g));
        const double dx_wv = fd3(eval_omega2(tr, 0.0, g), eval_omega2(tr, -delta, g),
                                 eval_omega2(tr, -2.0 * delta, g));
        rep.iface_du_max = std::max({rep.iface_du_max, std::abs(dx_sq - tr.nu2(g)),
                                     std::abs(-dx_wv - tr.nu2(g))});
        // across x = 1
        rep.iface_u_max = std::max({rep.iface_u_max, std::abs(u0(1.0, g) - tr.tau3(g)),
                                    std::abs(eval_omega3(tr, 1.0, g) - tr.tau3(g))});
        const double dxr_sq = -fd3(u0(1.0, g), u0(1.0 - delta, g), u0(1.0 - 2.0 * delta, g));
        const double dxr_wv = fd3(eval_omega3(tr, 1.0, g), eval_omega3(tr, 1.0 + delta, g),
                                  eval_omega3(tr, 1.0 + 2.0 * delta, g));
        rep.iface_du_max = std::max({rep.iface_du_max, std::abs(dxr_sq - tr.nu3(g)),
                                     std::abs(dxr_wv - tr.nu3(g))});
    }
    return rep;
}

// One grid of a refinement ladder: solve size, sup-norm trace errors,
// condition-(2)..(4) residual maxima, and the conditioning estimate.
struct ConvergenceRow {
    std::size_t M = 0;
    std::array<double, 9> err{};
    double res2 = 0.0, res3 = 0.0, res4 = 0.0;
    double cond = 0.0;
};

struct ConvergenceStudy {
    std::string case_name;
    std::vector<ConvergenceRow> rows;
};

inline ConvergenceStudy convergence_study(const MmsCase& c, const std::vector<std::size_t>& Ms,
                                          int K = 8) {
    ConvergenceStudy st;
    st.case_name = c.name;
    for (std::size_t M : Ms) {
        if (M < 4 || M % 2 != 0) throw std::invalid_argument("ladder entries must be even, >= 4");
        const ValidatedProblem vp = validate_problem(c.problem(M, K));
        const Solution sol = solve_problem(vp);
        ConvergenceRow row;
        row.M = M;
        row.err = trace_errors(sol, c);
        const ResidualReport rep = residual_nonlocal(sol.traces, vp, M + 1);
        row.res2 = rep.res2_max;
        row.res3 = rep.res3_max;
        row.res4 = rep.res4_max;
        row.cond = sol.diag.cond_estimate;
        st.rows.push_back(row);
    }
    return st;
}

// log2 error ratios between consecutive rows; entries with errors at rounding
// level (either side below floor) are reported as NaN and skipped by readers.
inline std::vector<std::array<double, 9>> observed_orders(const ConvergenceStudy& st,
                                                          double floor_err = 1e-12) {
    std::vector<std::array<double, 9>> out;
    for (std::size_t r = 1; r < st.rows.size(); ++r) {
        std::array<double, 9> o{};
        for (std::size_t c = 0; c < 9; ++c) {
            const double e0 = st.rows[r - 1].err[c], e1 = st.rows[r].err[c];
            o[c] = (e0 > floor_err && e1 > floor_err) ? std::log2(e0 / e1)
                                                      : std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(o);
    }
    return out;
}

}  // namespace pht
