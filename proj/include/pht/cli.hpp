#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "pht/field.hpp"
#include "pht/io.hpp"
#include "pht/kernels.hpp"
#include "pht/problem.hpp"
#include "pht/traces.hpp"
#include "pht/verify.hpp"

namespace pht::cli {

// exit codes: 0 ok, 1 usage, 2 validation, 3 numerical failure
enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

namespace detail {

inline void apply_thread_cap() {
    if (const char* env = std::getenv("SOLVER_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            throw CLI::ValidationError("SOLVER_THREADS", "must be a positive integer");
        Eigen::setNbThreads(static_cast<int>(n));
    }
}

inline ResidualReport full_report(const ValidatedProblem& vp, const TraceSet& tr,
                                  const Field2D& field) {
    ResidualReport rep = residual_nonlocal(tr, vp, vp.spec.M + 1);
    const auto u0 = [&field](double x, double y) { return field(x, y); };
    const ResidualReport ir =
        interface_continuity(u0, tr, vp.spec.M, 1.0 / static_cast<double>(vp.spec.M));
    rep.iface_u_max = ir.iface_u_max;
    rep.iface_du_max = ir.iface_du_max;
    return rep;
}

inline int run_solve(const std::string& config, const std::string& out,
                     std::optional<std::size_t> M_over, std::optional<int> K_over) {
    ProblemSpec spec = load_problem_config(config);
    if (M_over) spec.M = *M_over;
    if (K_over) spec.K = *K_over;
    const ValidatedProblem vp = validate_problem(spec);
    const Solution sol = solve_problem(vp);
    const Field2D field = heat_field_cn(sol.traces.tau1, sol.traces.tau2, sol.traces.tau3,
                                        vp.spec.M, vp.spec.M);
    const ResidualReport rep = full_report(vp, sol.traces, field);
    namespace fs = std::filesystem;
    const fs::path dir(out);
    write_traces_csv(dir / "traces.csv", sol.traces, sol.chars);
    write_field_csv(dir / "field.csv", field, sol.traces);
    write_report_json(dir / "report.json", sol, rep);
    std::cout << "solve: M=" << vp.spec.M << " K=" << vp.spec.K
              << " cond=" << sol.diag.cond_estimate << " res2=" << rep.res2_max
              << " res3=" << rep.res3_max << " res4=" << rep.res4_max << '\n'
              << "wrote " << (dir / "traces.csv").string() << ", field.csv, report.json\n";
    return kOk;
}

inline int run_verify(const std::string& config, const std::string& out) {
    const ProblemSpec spec = load_problem_config(config);
    const ValidatedProblem vp = validate_problem(spec);
    namespace fs = std::filesystem;
    const fs::path dir(out);
    const LoadedTraces lt = read_traces_csv(dir / "traces.csv");
    const nlohmann::json stored = read_json(dir / "report.json");
    const std::size_t M = lt.traces.tau1.n();
    const Field2D field = heat_field_cn(lt.traces.tau1, lt.traces.tau2, lt.traces.tau3, M, M);
    ResidualReport rep = residual_nonlocal(lt.traces, vp, M + 1);
    const auto u0 = [&field](double x, double y) { return field(x, y); };
    const ResidualReport ir =
        interface_continuity(u0, lt.traces, M, 1.0 / static_cast<double>(M));
    rep.iface_u_max = ir.iface_u_max;
    rep.iface_du_max = ir.iface_du_max;

    bool ok = true;
    const auto check = [&](const char* key, double fresh) {
        if (!stored.contains(key)) {
            std::cerr << "verify: report.json missing key " << key << '\n';
            ok = false;
            return;
        }
        const double old = stored.at(key).get<double>();
        const double tol = 1e-9 + 1e-6 * std::abs(old);
        std::cout << "verify: " << key << " stored=" << old << " recomputed=" << fresh << '\n';
        if (!(std::abs(fresh - old) <= tol)) {
            std::cerr << "verify: mismatch on " << key << " (stored " << old << ", recomputed "
                      << fresh << ")\n";
            ok = false;
        }
    };
    check("res2_max", rep.res2_max);
    check("res2_l2", rep.res2_l2);
    check("res3_max", rep.res3_max);
    check("res3_l2", rep.res3_l2);
    check("res4_max", rep.res4_max);
    check("res4_l2", rep.res4_l2);
    check("iface_u_max", rep.iface_u_max);
    check("iface_du_max", rep.iface_du_max);
    if (!ok) {
        std::cerr << "verify: output directory is not consistent with its config\n";
        return kNumerical;
    }
    std::cout << "verify: OK\n";
    return kOk;
}

inline int run_mms(const std::string& case_name, const std::string& grids,
                   const std::string& out, int K) {
    std::vector<std::size_t> Ms;
    std::stringstream ss(grids);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const long v = std::strtol(tok.c_str(), nullptr, 10);
        if (v < 4 || v % 2 != 0)
            throw CLI::ValidationError("--grids", "entries must be even integers >= 4");
        Ms.push_back(static_cast<std::size_t>(v));
    }
    if (Ms.empty()) throw CLI::ValidationError("--grids", "empty grid list");
    const MmsCase c = mms_case(case_name);
    const ConvergenceStudy st = convergence_study(c, Ms, K);
    write_convergence_csv(std::filesystem::path(out) / "convergence.csv", st);
    for (const ConvergenceRow& row : st.rows) {
        double worst = 0.0;
        for (double e : row.err) worst = std::max(worst, e);
        std::cout << "mms " << c.name << ": M=" << row.M << " max_err=" << worst
                  << " cond=" << row.cond << '\n';
    }
    std::cout << "wrote " << (std::filesystem::path(out) / "convergence.csv").string() << '\n';
    return kOk;
}

inline int run_kernels(const std::string& table, double x, double xi, double s, int K,
                       const std::string& dump) {
    KernelConfig cfg;
    cfg.K = K;
    double (*eval)(double, double, double, double, const KernelConfig&) = nullptr;
    if (table == "Gbar")
        eval = [](double a, double b, double c, double d, const KernelConfig& k) {
            return eval_gbar(a, b, c, d, k);
        };
    else if (table == "N")
        eval = [](double a, double b, double c, double d, const KernelConfig& k) {
            return eval_n(a, b, c, d, k);
        };
    else if (table == "Gbar_dx")
        eval = [](double a, double b, double c, double d, const KernelConfig& k) {
            return eval_gbar_dx(a, b, c, d, k);
        };
    else
        throw CLI::ValidationError("--table", "must be one of Gbar, N, Gbar_dx");
    if (!dump.empty()) {
        // 21x21 table over (x, xi) at the requested time separation
        std::ostringstream os;
        os << "x,y,xi,eta,value\n";
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const double xx = i / 20.0, xj = j / 20.0;
                os << pht::detail::fmt17(xx) << ',' << pht::detail::fmt17(s) << ',' << pht::detail::fmt17(xj) << ',' << pht::detail::fmt17(0.0)
                   << ',' << pht::detail::fmt17(eval(xx, s, xj, 0.0, cfg)) << '\n';
            }
        pht::detail::write_atomic(dump, os.str());
        std::cout << "wrote " << dump << '\n';
        return kOk;
    }
    std::printf("%.17g\n", eval(x, 0.0, xi, -s, cfg));
    return kOk;
}

}  // namespace detail

// Front end. Returns the process exit code; never throws.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"nonlocal mixed-type solver"};
    app.require_subcommand(1);

    std::string config, out = ".", case_name = "quadratic", grids = "32,64,128,256";
    std::string table = "N";
    double x = 0.0, xi = 0.0, s = 0.25;
    std::optional<std::size_t> M_over;
    std::optional<int> K_over;
    int K = 8;

    CLI::App* solve = app.add_subcommand("solve", "solve a problem config and write artifacts");
    solve->add_option("--config", config, "problem config (JSON)")->required();
    solve->add_option("--out", out, "output directory");
    solve->add_option("--M", M_over, "override grid size");
    solve->add_option("--K", K_over, "override image count");

    CLI::App* verify = app.add_subcommand("verify", "re-check an existing output directory");
    verify->add_option("--config", config, "problem config (JSON)")->required();
    verify->add_option("--out", out, "output directory to re-check")->required();

    CLI::App* mms = app.add_subcommand("mms", "run a manufactured-solution refinement ladder");
    mms->add_option("--case", case_name, "catalog case name");
    mms->add_option("--grids", grids, "comma-separated even grid sizes");
    mms->add_option("--out", out, "output directory");
    mms->add_option("--K", K, "image count");

    CLI::App* kernels = app.add_subcommand("kernels", "print one strip heat-kernel value");
    kernels->add_option("--table", table, "Gbar, N, or Gbar_dx");
    kernels->add_option("--x", x, "field point");
    kernels->add_option("--xi", xi, "source point");
    kernels->add_option("--s", s, "time separation (y - eta)")->required();
    kernels->add_option("--K", K, "image count");
    std::string dump;
    kernels->add_option("--dump", dump, "write a 21x21 (x, xi) table to this CSV path");

    try {
        app.parse(argc, argv);
        detail::apply_thread_cap();
        if (solve->parsed()) return detail::run_solve(config, out, M_over, K_over);
        if (verify->parsed()) return detail::run_verify(config, out);
        if (mms->parsed()) return detail::run_mms(case_name, grids, out, K);
        return detail::run_kernels(table, x, xi, s, K, dump);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        std::cerr << "expression error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const KernelDomainError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace pht::cli
