#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pht/quadrature.hpp"

using namespace pht;

TEST_CASE("grid function sampling and interpolation") {
    GridFunction g = sample_grid(0.0, 1.0, 4, [](double t) { return 2.0 * t; });
    REQUIRE(g.n() == 4);
    CHECK(g.step() == Catch::Approx(0.25));
    CHECK(g.node(2) == Catch::Approx(0.5));
    // piecewise-linear read is exact on linear data, including off-node
    CHECK(g(0.125) == Catch::Approx(0.25).margin(1e-15));
    CHECK(g(1.0) == Catch::Approx(2.0));
    // clamped outside
    CHECK(g(-0.5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(g(1.5) == Catch::Approx(2.0));
}

TEST_CASE("trapz is exact for linear integrands") {
    GridFunction g = sample_grid(0.0, 2.0, 41, [](double t) { return 3.0 * t - 1.0; });
    CHECK(trapz(g) == Catch::Approx(4.0).margin(1e-13));
}

TEST_CASE("trapz converges at second order on smooth data") {
    auto f = [](double t) { return std::sin(t); };
    const double exact = 1.0 - std::cos(1.0);
    const double e1 = std::abs(trapz(sample_grid(0.0, 1.0, 17, f)) - exact);
    const double e2 = std::abs(trapz(sample_grid(0.0, 1.0, 33, f)) - exact);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("cumtrapz endpoints and consistency with trapz") {
    GridFunction g = sample_grid(0.0, 1.0, 33, [](double t) { return t * t; });
    GridFunction c = cumtrapz(g);
    REQUIRE(c.n() == g.n());
    CHECK(c.v.front() == 0.0);
    CHECK(c.v.back() == Catch::Approx(trapz(g)).margin(1e-15));
    // monotone for positive integrand
    for (std::size_t j = 1; j < c.v.size(); ++j) CHECK(c.v[j] >= c.v[j - 1]);
}

TEST_CASE("diff_nodal recovers the derivative of quadratics exactly") {
    GridFunction g = sample_grid(0.0, 1.0, 17, [](double t) { return 3.0 * t * t - t + 2.0; });
    GridFunction d = diff_nodal(g);
    for (std::size_t j = 0; j <= g.n(); ++j) {
        const double t = g.node(j);
        CHECK(d.v[j] == Catch::Approx(6.0 * t - 1.0).margin(1e-12));
    }
}

TEST_CASE("diff_nodal second-order convergence on smooth data") {
    auto f = [](double t) { return std::exp(t); };
    auto sup_err = [&](std::size_t n) {
        GridFunction d = diff_nodal(sample_grid(0.0, 1.0, n + 1, f));
        double m = 0.0;
        for (std::size_t j = 0; j <= n; ++j)
            m = std::max(m, std::abs(d.v[j] - std::exp(d.node(j))));
        return m;
    };
    const double e1 = sup_err(32), e2 = sup_err(64);
    CHECK(e1 / e2 > 3.0);
}

TEST_CASE("matrix forms agree with the concrete operators") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 24;
    const double h = 1.0 / static_cast<double>(n);
    GridFunction g;
    g.lo = 0.0;
    g.hi = 1.0;
    g.v.resize(n + 1);
    for (double& x : g.v) x = u(rng);
    Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(g.v.data(), g.v.size());

    const Eigen::VectorXd dm = diff_matrix(n, h) * vec;
    const GridFunction dg = diff_nodal(g);
    const Eigen::VectorXd cm = cumtrapz_matrix(n, h) * vec;
    const GridFunction cg = cumtrapz(g);
    for (std::size_t j = 0; j <= n; ++j) {
        CHECK(dm[static_cast<long>(j)] == Catch::Approx(dg.v[j]).margin(1e-14));
        CHECK(cm[static_cast<long>(j)] == Catch::Approx(cg.v[j]).margin(1e-14));
    }
}

TEST_CASE("square-root product weights integrate the interpolant exactly") {
    // reference values of int_0^1 eta^k / sqrt(1-eta) d eta
    const double mom1 = 4.0 / 3.0, mom2 = 16.0 / 15.0, mom3 = 32.0 / 35.0;
    const std::size_t M = 64;
    const double h = 1.0 / static_cast<double>(M);
    std::vector<double> w = product_weights_sqrt(M, h);
    REQUIRE(w.size() == M + 1);
    auto apply = [&](auto&& f) {
        double s = 0.0;
        for (std::size_t i = 0; i <= M; ++i) s += w[i] * f(h * static_cast<double>(i));
        return s;
    };
    // linear integrand: product rule is exact up to roundoff
    CHECK(apply([](double e) { return e; }) == Catch::Approx(mom1).margin(1e-13));
    // smooth integrands: second-order accurate
    CHECK(apply([](double e) { return e * e; }) == Catch::Approx(mom2).margin(1e-4));
    CHECK(apply([](double e) { return e * e * e; }) == Catch::Approx(mom3).margin(5e-4));

    // weights are nonnegative and sum to the 1/sqrt moment: int_0^1 (1-eta)^{-1/2} = 2
    double s = 0.0;
    for (double x : w) {
        CHECK(x >= 0.0);
        s += x;
    }
    CHECK(s == Catch::Approx(2.0).margin(1e-13));
}

TEST_CASE("product weights refine at second order") {
    auto err = [](std::size_t M) {
        const double h = 1.0 / static_cast<double>(M);
        std::vector<double> w = product_weights_sqrt(M, h);
        double s = 0.0;
        for (std::size_t i = 0; i <= M; ++i) {
            const double e = h * static_cast<double>(i);
            s += w[i] * std::cos(e);
        }
        // int_0^1 cos(eta)/sqrt(1-eta) d eta via high-resolution reference
        return std::abs(s - 1.499596609713972);
    };
    CHECK(err(32) / err(64) > 3.0);
}

TEST_CASE("partial upper limit weights cover t_j < 1") {
    // int_0^{1/2} eta / sqrt(1/2 - eta) d eta = (4/3) * (1/2)^{3/2}
    const std::size_t M = 64, j = 32;
    const double h = 1.0 / static_cast<double>(M);
    std::vector<double> w = product_weights_sqrt(j, h);
    REQUIRE(w.size() == j + 1);
    double s = 0.0;
    for (std::size_t i = 0; i <= j; ++i) s += w[i] * (h * static_cast<double>(i));
    CHECK(s == Catch::Approx((4.0 / 3.0) * std::pow(0.5, 1.5)).margin(1e-13));
}
