#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pht/field.hpp"
#include "pht/verify.hpp"

using namespace pht;

namespace {

ProblemSpec make_spec(const std::array<std::string, 9>& c, std::size_t M, int K) {
    ProblemSpec s;
    s.a1 = parse_scalar_func(c[0]);
    s.a2 = parse_scalar_func(c[1]);
    s.a3 = parse_scalar_func(c[2]);
    s.b1 = parse_scalar_func(c[3]);
    s.b2 = parse_scalar_func(c[4]);
    s.b3 = parse_scalar_func(c[5]);
    s.c1 = parse_scalar_func(c[6]);
    s.c2 = parse_scalar_func(c[7]);
    s.c3 = parse_scalar_func(c[8]);
    s.M = M;
    s.K = K;
    return s;
}

// one-sided three-point derivative of f at 0 using f(0), f(d), f(2d)
double fd3(double f0, double f1, double f2, double d) {
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * d);
}

}  // namespace

TEST_CASE("manufactured catalog is internally consistent", "[verify]") {
    const double d = 1e-4;
    for (const auto& c : mms_catalog()) {
        INFO("case " << c.name);

        // trace closures agree with the region fields on the walls
        for (const double t : {0.0, 0.25, 0.5, 0.813, 1.0}) {
            CHECK(std::abs(c.tau1(t) - c.u0(t, 0.0)) < 1e-12);
            CHECK(std::abs(c.tau2(t) - c.u0(0.0, t)) < 1e-12);
            CHECK(std::abs(c.tau3(t) - c.u0(1.0, t)) < 1e-12);
        }
        for (const double t : {0.0, 0.2, 0.5}) CHECK(std::abs(c.phi1(t) - c.u(-t, t)) < 1e-12);
        for (const double s : {0.5, 0.75, 1.0})
            CHECK(std::abs(c.phi2(s) - c.u(2.0 - s, 1.0 - s)) < 1e-12);

        // transversal derivatives match one-sided differencing of the square
        // field, and p differentiates phi1
        for (const double t : {0.25, 0.5, 0.75}) {
            CHECK(std::abs(fd3(c.u0(t, 0.0), c.u0(t, d), c.u0(t, 2 * d), d) - c.nu1(t)) < 1e-5);
            CHECK(std::abs(fd3(c.u0(0.0, t), c.u0(d, t), c.u0(2 * d, t), d) - c.nu2(t)) < 1e-5);
            CHECK(std::abs(-fd3(c.u0(1.0, t), c.u0(1.0 - d, t), c.u0(1.0 - 2 * d, t), d) -
                           c.nu3(t)) < 1e-5);
        }
        for (const double t : {0.1, 0.3})
            CHECK(std::abs((c.phi1(t + d) - c.phi1(t - d)) / (2 * d) - c.p(t)) < 1e-6);

        // q is the outgoing characteristic derivative u_x - u_y read on the
        // right characteristic edge, differenced into the triangle interior
        for (const double s : {0.6, 0.75, 0.9}) {
            const double x = 2.0 - s;
            const double ux = fd3(c.u3(x, s), c.u3(x - d, s), c.u3(x - 2 * d, s), -d);
            const double uy = fd3(c.u3(x, s), c.u3(x, s - d), c.u3(x, s - 2 * d), -d);
            CHECK(std::abs((ux - uy) - c.q(s)) < 1e-5);
        }
    }
}

TEST_CASE("exact traces satisfy the nonlocal conditions at aligned probes", "[verify]") {
    const std::size_t M = 64;
    for (const auto& c : mms_catalog()) {
        INFO("case " << c.name);
        const ValidatedProblem vp = validate_problem(c.problem(M, 8));
        const TraceSet tr = exact_traces(c, M);
        const ResidualReport rep = residual_nonlocal(tr, vp, M + 1);
        CHECK(rep.res2_max < 1e-10);
        CHECK(rep.res3_max < 1e-10);
        CHECK(rep.res4_max < 1e-10);
        CHECK(rep.res2_l2 <= rep.res2_max + 1e-15);
        CHECK(rep.res3_l2 <= rep.res3_max + 1e-15);
    }
    CHECK_THROWS_AS(residual_nonlocal(exact_traces(mms_case("constant"), M),
                                      validate_problem(mms_case("constant").problem(M, 8)), 2),
                    std::invalid_argument);
}

TEST_CASE("residuals localize a perturbed condition", "[verify]") {
    const std::size_t M = 64;
    const MmsCase c = mms_case("quadratic");
    const TraceSet tr = exact_traces(c, M);

    for (int slot : {2, 5, 8}) {
        auto coeff = c.coeff;
        coeff[static_cast<std::size_t>(slot)] =
            "(" + coeff[static_cast<std::size_t>(slot)] + ")+0.1";
        const ValidatedProblem vp = validate_problem(make_spec(coeff, M, 8));
        const ResidualReport rep = residual_nonlocal(tr, vp, M + 1);
        const std::array<double, 3> mx = {rep.res2_max, rep.res3_max, rep.res4_max};
        for (int k = 0; k < 3; ++k) {
            INFO("slot " << slot << " channel " << k);
            if (k == slot / 3) {
                CHECK(std::abs(mx[static_cast<std::size_t>(k)] - 0.1) < 1e-9);
            } else {
                CHECK(mx[static_cast<std::size_t>(k)] < 1e-10);
            }
        }
        // the L2 profile of a constant offset over a half-unit interval
        if (slot == 2) CHECK(std::abs(rep.res2_l2 - 0.1 * std::sqrt(0.5)) < 1e-6);
    }
}

TEST_CASE("interface gluing vanishes on consistent data", "[verify]") {
    const std::size_t M = 64;
    for (const auto& c : mms_catalog()) {
        INFO("case " << c.name);
        const TraceSet tr = exact_traces(c, M);
        const ResidualReport rep = interface_continuity(c.u0, tr, 33, 1.0 / M);
        CHECK(rep.iface_u_max < 1e-10);
        CHECK(rep.iface_du_max < 1e-9);
    }

    const TraceSet tr = exact_traces(mms_case("quadratic"), M);
    CHECK_THROWS_AS(interface_continuity(mms_case("quadratic").u0, tr, 33, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(interface_continuity(mms_case("quadratic").u0, tr, 33, 0.0),
                    std::invalid_argument);

    // mismatched square field against the quadratic traces is flagged
    const ResidualReport bad =
        interface_continuity(mms_case("linear").u0, tr, 33, 1.0 / M);
    CHECK(bad.iface_u_max > 0.05);
}

TEST_CASE("solved traces pass the full verification chain", "[verify]") {
    const std::size_t M = 64;
    const MmsCase c = mms_case("quadratic");
    const ValidatedProblem vp = validate_problem(c.problem(M, 8));
    const Solution sol = solve_problem(vp);

    const ResidualReport rep = residual_nonlocal(sol.traces, vp, M + 1);
    CHECK(rep.res2_max < 1e-4);
    CHECK(rep.res3_max < 1e-4);
    CHECK(rep.res4_max < 1e-3);

    const Field2D f = heat_field_cn(sol.traces.tau1, sol.traces.tau2, sol.traces.tau3, M, M);
    const auto u0 = [&f](double x, double y) { return f(x, y); };
    const ResidualReport glue = interface_continuity(u0, sol.traces, M, 1.0 / M);
    CHECK(glue.iface_u_max < 1e-8);
    CHECK(glue.iface_du_max < 1e-2);
}

TEST_CASE("trace error norms react to a single deviation", "[verify]") {
    const std::size_t M = 32;
    const MmsCase c = mms_case("quadratic");
    Solution sol;
    sol.traces = exact_traces(c, M);
    sol.chars = exact_chars(c, M);
    sol.p = sample_grid(0.0, 0.5, M, c.p);
    sol.q = sample_grid(0.5, 1.0, M, c.q);

    auto err = trace_errors(sol, c);
    for (double e : err) CHECK(e < 1e-12);

    sol.traces.tau2.v[10] += 0.01;
    err = trace_errors(sol, c);
    CHECK(std::abs(err[2] - 0.01) < 1e-12);
    CHECK(err[0] < 1e-12);
    CHECK(err[3] < 1e-12);

    CHECK(std::string(kTraceErrorNames[0]) == "tau1");
    CHECK(std::string(kTraceErrorNames[2]) == "tau2");
    CHECK(std::string(kTraceErrorNames[8]) == "phi3");
}

TEST_CASE("convergence studies stamp rows and expose orders", "[verify]") {
    const MmsCase c = mms_case("quadratic");
    const ConvergenceStudy st = convergence_study(c, {8, 16, 32}, 6);
    REQUIRE(st.rows.size() == 3);
    CHECK(st.case_name == "quadratic");
    CHECK(st.rows[0].M == 8);
    CHECK(st.rows[2].M == 32);
    for (const auto& row : st.rows) {
        CHECK(row.cond > 1.0);
        CHECK(row.cond < 1e4);
    }
    // tau1 error shrinks down the ladder and the ratio approaches 2nd order
    CHECK(st.rows[1].err[0] < st.rows[0].err[0]);
    CHECK(st.rows[2].err[0] < st.rows[1].err[0]);
    const auto orders = observed_orders(st);
    REQUIRE(orders.size() == 2);
    CHECK(orders[1][0] > 1.0);
    CHECK(orders[1][0] < 3.5);

    // rounding-level errors are masked instead of producing fake orders
    const ConvergenceStudy lin = convergence_study(mms_case("linear"), {8, 16}, 6);
    CHECK(lin.rows[1].err[0] < 1e-10);
    const auto lin_orders = observed_orders(lin);
    REQUIRE(lin_orders.size() == 1);
    CHECK(std::isnan(lin_orders[0][0]));

    CHECK_THROWS_AS(convergence_study(c, {7}, 6), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(c, {2}, 6), std::invalid_argument);
}

TEST_CASE("catalog lookup is by name and rejects unknowns", "[verify]") {
    const auto cat = mms_catalog();
    REQUIRE(cat.size() == 3);
    CHECK(cat[0].name == "constant");
    CHECK(cat[1].name == "linear");
    CHECK(cat[2].name == "quadratic");
    CHECK(mms_case("linear").name == "linear");
    CHECK_THROWS_AS(mms_case("cubic"), std::invalid_argument);
}
