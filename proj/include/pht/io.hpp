#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pht/traces.hpp"
#include "pht/verify.hpp"

namespace pht {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Fixed 17-significant-digit formatting: CSV bodies must be byte-identical
// across runs and round-trip doubles exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// All file outputs go through a temp-file rename so a failed run never
// leaves a partial artifact behind.
inline void write_atomic(const std::filesystem::path& path, const std::string& body) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << body;
        if (!out.flush()) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace detail

// traces.csv: one row per master-grid node. Wall traces ride the master
// abscissa t; the characteristic traces ride their own half-step abscissas
// (s_phi1 on [0,1/2], s_phi23 on [1/2,1]) carried in dedicated columns.
inline void write_traces_csv(const std::filesystem::path& path, const TraceSet& tr,
                             const CharacteristicData& ch) {
    const std::size_t n = tr.tau1.n();
    std::ostringstream os;
    os << "t,tau1,nu1,tau2,nu2,tau3,nu3,s_phi1,phi1,s_phi23,phi2,phi3\n";
    for (std::size_t j = 0; j <= n; ++j) {
        using detail::fmt17;
        os << fmt17(tr.tau1.node(j)) << ',' << fmt17(tr.tau1.v[j]) << ',' << fmt17(tr.nu1.v[j])
           << ',' << fmt17(tr.tau2.v[j]) << ',' << fmt17(tr.nu2.v[j]) << ','
           << fmt17(tr.tau3.v[j]) << ',' << fmt17(tr.nu3.v[j]) << ',' << fmt17(ch.phi1.node(j))
           << ',' << fmt17(ch.phi1.v[j]) << ',' << fmt17(ch.phi2.node(j)) << ','
           << fmt17(ch.phi2.v[j]) << ',' << fmt17(ch.phi3.v[j]) << '\n';
    }
    detail::write_atomic(path, os.str());
}

struct LoadedTraces {
    TraceSet traces;
    CharacteristicData chars;
};

inline LoadedTraces read_traces_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,tau1,", 0) != 0)
        throw IoError(path.string() + ": not a traces file");
    std::vector<std::array<double, 12>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 12> row{};
        std::istringstream ls(line);
        std::string cell;
        for (auto& slot : row) {
            if (!std::getline(ls, cell, ',')) throw IoError(path.string() + ": short row");
            slot = std::stod(cell);
        }
        rows.push_back(row);
    }
    if (rows.size() < 5) throw IoError(path.string() + ": too few rows");
    const std::size_t n = rows.size() - 1;
    LoadedTraces lt;
    auto fill = [&](GridFunction& g, double lo, double hi, std::size_t col) {
        g.lo = lo;
        g.hi = hi;
        g.v.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) g.v[j] = rows[j][col];
    };
    fill(lt.traces.tau1, 0.0, 1.0, 1);
    fill(lt.traces.nu1, 0.0, 1.0, 2);
    fill(lt.traces.tau2, 0.0, 1.0, 3);
    fill(lt.traces.nu2, 0.0, 1.0, 4);
    fill(lt.traces.tau3, 0.0, 1.0, 5);
    fill(lt.traces.nu3, 0.0, 1.0, 6);
    fill(lt.chars.phi1, 0.0, 0.5, 8);
    fill(lt.chars.phi2, 0.5, 1.0, 10);
    fill(lt.chars.phi3, 0.5, 1.0, 11);
    return lt;
}

// field.csv: uniform lattice over the bounding box of the mixed domain,
// rows only for points inside it, with the subdomain id and the field value.
// The square is sampled from the parabolic solve; the triangles from the
// d'Alembert evaluators.
inline void write_field_csv(const std::filesystem::path& path, const Field2D& sq,
                            const TraceSet& tr) {
    using detail::fmt17;
    const std::size_t M = sq.nx;
    const double h = 1.0 / static_cast<double>(M);
    std::ostringstream os;
    os << "x,y,subdomain_id,u\n";
    const auto emit = [&](double x, double y, int id, double u) {
        os << fmt17(x) << ',' << fmt17(y) << ',' << id << ',' << fmt17(u) << '\n';
    };
    const double e = 1e-12;
    for (long jy = -static_cast<long>(M) / 2; jy <= static_cast<long>(M); ++jy) {
        const double y = h * static_cast<double>(jy);
        for (long jx = -static_cast<long>(M) / 2; jx <= 3 * static_cast<long>(M) / 2; ++jx) {
            const double x = h * static_cast<double>(jx);
            if (x >= -e && x <= 1.0 + e && y >= -e && y <= 1.0 + e) {
                emit(x, y, 0, sq.at(static_cast<std::size_t>(std::max<long>(jx, 0)),
                                    static_cast<std::size_t>(std::max<long>(jy, 0))));
            } else if (y < 0.0 && x > -e && x < 1.0 + e && y >= std::max(-x, x - 1.0) - e) {
                emit(x, y, 1, eval_omega1(tr, x, y));
            } else if (x < 0.0 && x >= -0.5 - e && y >= -x - e && y <= x + 1.0 + e) {
                emit(x, y, 2, eval_omega2(tr, x, y));
            } else if (x > 1.0 && x <= 1.5 + e && y >= x - 1.0 - e && y <= 2.0 - x + e) {
                emit(x, y, 3, eval_omega3(tr, x, y));
            }
        }
    }
    detail::write_atomic(path, os.str());
}

// report.json: flat numeric map of solve diagnostics and residual magnitudes.
inline void write_report_json(const std::filesystem::path& path, const Solution& sol,
                              const ResidualReport& rep) {
    nlohmann::ordered_json j;
    j["M"] = sol.diag.M;
    j["K"] = sol.diag.K;
    j["alpha"] = sol.traces.tau1.v.front();
    j["beta"] = sol.traces.tau1.v.back();
    j["cond_estimate"] = sol.diag.cond_estimate;
    j["truncation_bound"] = sol.diag.truncation;
    j["residual_eq1"] = sol.diag.residual_eq1;
    j["residual_eq2"] = sol.diag.residual_eq2;
    j["res2_max"] = rep.res2_max;
    j["res2_l2"] = rep.res2_l2;
    j["res3_max"] = rep.res3_max;
    j["res3_l2"] = rep.res3_l2;
    j["res4_max"] = rep.res4_max;
    j["res4_l2"] = rep.res4_l2;
    j["iface_u_max"] = rep.iface_u_max;
    j["iface_du_max"] = rep.iface_du_max;
    detail::write_atomic(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// convergence.csv: the refinement ladder with per-row sup-norm errors,
// residual maxima, conditioning, and observed orders vs the previous row
// (nan on the first row).
inline void write_convergence_csv(const std::filesystem::path& path,
                                  const ConvergenceStudy& st) {
    using detail::fmt17;
    std::ostringstream os;
    os << "M";
    for (const char* nm : kTraceErrorNames) os << ",err_" << nm;
    os << ",res2,res3,res4,cond";
    for (const char* nm : kTraceErrorNames) os << ",order_" << nm;
    os << '\n';
    const auto orders = observed_orders(st);
    for (std::size_t r = 0; r < st.rows.size(); ++r) {
        const ConvergenceRow& row = st.rows[r];
        os << row.M;
        for (double v : row.err) os << ',' << fmt17(v);
        os << ',' << fmt17(row.res2) << ',' << fmt17(row.res3) << ',' << fmt17(row.res4) << ','
           << fmt17(row.cond);
        for (std::size_t c = 0; c < 9; ++c)
            os << ',' << (r == 0 ? std::string("nan") : fmt17(orders[r - 1][c]));
        os << '\n';
    }
    detail::write_atomic(path, os.str());
}

}  // namespace pht
