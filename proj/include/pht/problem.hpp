#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pht/expr.hpp"

namespace pht {

// One problem instance: nine coefficient functions plus discretization knobs.
// a-coefficients live on [0,1/2]; b- and c-coefficients on [1/2,1].
struct ProblemSpec {
    ScalarFunc a1, a2, a3;
    ScalarFunc b1, b2, b3;
    ScalarFunc c1, c2, c3;
    int M = 64;          // master grid steps on [0,1]; must be even
    int K = 8;           // kernel image-series half-width
    double eps0 = 1e-8;  // lower bound enforced on the divided-by coefficients
};

struct CornerValues {
    double tau1_at_0 = 0.0;
    double tau1_at_1 = 0.0;
};

struct ValidationError : std::runtime_error {
    std::vector<std::string> issues;
    explicit ValidationError(std::vector<std::string> list)
        : std::runtime_error(join(list)), issues(std::move(list)) {}
    static std::string join(const std::vector<std::string>& list) {
        std::string out = "problem validation failed:";
        for (const auto& s : list) out += "\n  - " + s;
        return out;
    }
};

struct ValidatedProblem {
    ProblemSpec spec;
    CornerValues corners;
};

namespace detail {

inline std::string fmt_t(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

// Applies `check` at every node of a dense probe grid and records violations.
template <typename Check>
void probe(double lo, double hi, std::size_t n, std::vector<std::string>& issues, Check&& check) {
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n);
        check(t);
        if (issues.size() > 32) return;  // enough to act on
    }
}

}  // namespace detail

// Checks every admissibility condition on a probe grid of >= 10*M points
// per coefficient interval and computes the two corner values of tau1.
inline ValidatedProblem validate_problem(const ProblemSpec& spec) {
    std::vector<std::string> issues;
    if (spec.M < 4 || spec.M % 2 != 0)
        issues.push_back("M must be an even integer >= 4, got " + std::to_string(spec.M));
    if (spec.K < 1) issues.push_back("K must be >= 1, got " + std::to_string(spec.K));
    if (!(spec.eps0 > 0.0)) issues.push_back("eps0 must be positive");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    const auto n = static_cast<std::size_t>(10 * spec.M);
    const double e0 = spec.eps0;

    auto finite_or = [&issues](const ScalarFunc& f, const char* name, double t) -> double {
        double val = 0.0;
        try {
            val = f(t);
        } catch (const EvalError& e) {
            issues.push_back(std::string(name) + " evaluation failed at t=" + detail::fmt_t(t) +
                             ": " + e.what());
            return 0.0;
        }
        if (!std::isfinite(val))
            issues.push_back(std::string(name) + " is non-finite at t=" + detail::fmt_t(t));
        return val;
    };

    detail::probe(0.0, 0.5, n, issues, [&](double t) {
        const double v1 = finite_or(spec.a1, "a1", t);
        const double v2 = finite_or(spec.a2, "a2", t);
        finite_or(spec.a3, "a3", t);
        if (v1 * v1 + v2 * v2 <= 0.0)
            issues.push_back("a1^2+a2^2>0 violated at t=" + detail::fmt_t(t));
        if (std::abs(v2) < e0)
            issues.push_back("|a2| >= eps0 violated at t=" + detail::fmt_t(t));
    });
    detail::probe(0.5, 1.0, n, issues, [&](double t) {
        const double v1 = finite_or(spec.b1, "b1", t);
        const double v2 = finite_or(spec.b2, "b2", t);
        finite_or(spec.b3, "b3", t);
        if (v1 * v1 + v2 * v2 <= 0.0)
            issues.push_back("b1^2+b2^2>0 violated at t=" + detail::fmt_t(t));
        if (std::abs(v1) < e0)
            issues.push_back("|b1| >= eps0 violated at t=" + detail::fmt_t(t));
        if (std::abs(v2) < e0)
            issues.push_back("|b2| >= eps0 violated at t=" + detail::fmt_t(t));
    });
    detail::probe(0.5, 1.0, n, issues, [&](double t) {
        const double v1 = finite_or(spec.c1, "c1", t);
        const double v2 = finite_or(spec.c2, "c2", t);
        finite_or(spec.c3, "c3", t);
        if (v1 * v1 + v2 * v2 <= 0.0)
            issues.push_back("c1^2+c2^2>0 violated at t=" + detail::fmt_t(t));
        if (std::abs(v1) < e0)
            issues.push_back("|c1| >= eps0 violated at t=" + detail::fmt_t(t));
    });

    CornerValues corners;
    {
        const double da = spec.a1(0.0) + spec.a2(0.0);
        const double db = spec.b1(1.0) + spec.b2(1.0);
        if (std::abs(da) < e0)
            issues.push_back("corner condition |a1(0)+a2(0)| >= eps0 violated");
        else
            corners.tau1_at_0 = spec.a3(0.0) / da;
        if (std::abs(db) < e0)
            issues.push_back("corner condition |b1(1)+b2(1)| >= eps0 violated");
        else
            corners.tau1_at_1 = spec.b3(1.0) / db;
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return ValidatedProblem{spec, corners};
}

inline CornerValues corner_values(const ValidatedProblem& vp) { return vp.corners; }

// Config document: {"a1": "<expr>", ..., "c3": "<expr>", "M": int, "K": int, "eps0": real}.
inline ProblemSpec problem_from_json(const nlohmann::json& j) {
    ProblemSpec spec;
    auto get = [&j](const char* key) -> ScalarFunc {
        if (!j.contains(key))
            throw std::runtime_error(std::string("config is missing field \"") + key + "\"");
        if (!j.at(key).is_string())
            throw std::runtime_error(std::string("config field \"") + key + "\" must be an expression string");
        return parse_scalar_func(j.at(key).get<std::string>());
    };
    spec.a1 = get("a1"); spec.a2 = get("a2"); spec.a3 = get("a3");
    spec.b1 = get("b1"); spec.b2 = get("b2"); spec.b3 = get("b3");
    spec.c1 = get("c1"); spec.c2 = get("c2"); spec.c3 = get("c3");
    spec.M = j.value("M", 64);
    spec.K = j.value("K", 8);
    spec.eps0 = j.value("eps0", 1e-8);
    return spec;
}

inline ProblemSpec load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return problem_from_json(j);
}

}  // namespace pht
