#pragma once

#include "kapitza/oracle.hpp"
#include "kapitza/potential.hpp"
#include "kapitza/series.hpp"
#include "kapitza/tunneling.hpp"
#include "kapitza/version.hpp"
#include "kapitza/wavefn.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace kapitza::cli {

using nlohmann::json;

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 regime advisory
// escalated by --strict.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_regime = 4;

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// --A / --B accept a scalar or start:stop:count (linear spacing).
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    std::string text = "0";

    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(static_cast<size_t>(std::max(count, 0)));
        if (count == 1) {
            v.push_back(start);
            return v;
        }
        for (int i = 0; i < count; ++i)
            v.push_back(start + (stop - start) * i / (count - 1));
        return v;
    }
};

inline GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    g.text = text;
    const auto c1 = text.find(':');
    try {
        if (c1 == std::string::npos) {
            size_t used = 0;
            g.start = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            g.stop = g.start;
            g.count = 1;
            return g;
        }
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos) throw std::invalid_argument(text);
        g.start = std::stod(text.substr(0, c1));
        g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("grid", "expected <value> or start:stop:count, got '" + text + "'");
    }
    if (g.count < 1)
        throw CLI::ValidationError("grid", "empty grid '" + text + "'");
    return g;
}

struct RunConfig {
    std::string command;
    GridSpec A;
    GridSpec B;
    int mu = 0;
    int order = 5;
    std::string sector = "edges"; // chart: edges | periodic | antiperiodic
    std::string format = "csv";
    std::string out;              // empty writes to stdout
    bool strict = false;
    unsigned long long seed = 0;
    int samples = 0;              // compare: >0 draws a seeded random sweep
    std::string action = "leading";
    std::string well = "0";       // wavefunction: 0 | pi
    std::string kind = "C";       // wavefunction: C | S
};

inline ActionVariant parse_action(const std::string& s) {
    if (s == "leading") return ActionVariant::leading;
    if (s == "plus") return ActionVariant::plus_branch;
    if (s == "minus") return ActionVariant::minus_branch;
    if (s == "symmetrized") return ActionVariant::symmetrized;
    throw CLI::ValidationError("--action", "unknown variant '" + s + "'");
}

namespace detail {

inline int thread_count() {
    if (const char* env = std::getenv("KAPITZA_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Static index partition; slot i only ever written by one worker, so the
// assembled output is independent of scheduling.
template <class F>
inline void parallel_for(int n, F&& body) {
    const int workers = std::min(thread_count(), std::max(n, 1));
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline void meta_line(std::string& out, const std::string& key,
                      const std::string& value) {
    out += "# ";
    out += key;
    out += "=";
    out += value;
    out += "\n";
}

inline void csv_header(std::string& out, const RunConfig& c, int k_max) {
    meta_line(out, "tool", std::string("kapitza ") + version_string);
    meta_line(out, "command", c.command);
    meta_line(out, "A", c.A.text);
    meta_line(out, "B", c.B.text);
    meta_line(out, "mu", std::to_string(c.mu));
    meta_line(out, "order", std::to_string(c.order));
    meta_line(out, "sector", c.sector);
    meta_line(out, "action", c.action);
    meta_line(out, "well", c.well);
    meta_line(out, "kind", c.kind);
    meta_line(out, "strict", c.strict ? "1" : "0");
    meta_line(out, "seed", std::to_string(c.seed));
    meta_line(out, "samples", std::to_string(c.samples));
    meta_line(out, "oracle_K_max", std::to_string(k_max));
    meta_line(out, "units", "dimensionless");
}

inline json config_json(const RunConfig& c, int k_max) {
    json j;
    j["tool"] = "kapitza";
    j["version"] = version_string;
    j["command"] = c.command;
    j["A"] = c.A.text;
    j["B"] = c.B.text;
    j["mu"] = c.mu;
    j["order"] = c.order;
    j["sector"] = c.sector;
    j["action"] = c.action;
    j["well"] = c.well;
    j["kind"] = c.kind;
    j["strict"] = c.strict;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["oracle_K_max"] = k_max;
    j["units"] = "dimensionless";
    return j;
}

// (A, B) evaluation points: the full cross product, or a seeded random
// sweep inside the grid bounding box when samples > 0.
inline std::vector<PendulumParams> evaluation_points(const RunConfig& c) {
    std::vector<PendulumParams> pts;
    if (c.samples > 0) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> da(
            std::min(c.A.start, c.A.stop), std::max(c.A.start, c.A.stop));
        std::uniform_real_distribution<double> db(
            std::min(c.B.start, c.B.stop), std::max(c.B.start, c.B.stop));
        pts.reserve(static_cast<size_t>(c.samples));
        for (int i = 0; i < c.samples; ++i) {
            const double a = da(rng);
            const double b = db(rng);
            pts.push_back({a, b});
        }
        return pts;
    }
    const auto as = c.A.values();
    const auto bs = c.B.values();
    pts.reserve(as.size() * bs.size());
    for (double a : as)
        for (double b : bs) pts.push_back({a, b});
    return pts;
}

inline int max_oracle_K(const std::vector<PendulumParams>& pts) {
    int k = 0;
    for (const auto& p : pts) k = std::max(k, auto_fourier_K(p.B));
    return k;
}

} // namespace detail

// ---------------------------------------------------------------------------
// chart: band edges over the grid, or the low eigenvalues of one sector.
// ---------------------------------------------------------------------------

inline int cmd_chart(const RunConfig& cfg, std::string& out, bool& advisory) {
    const auto pts = detail::evaluation_points(cfg);
    advisory = false;

    struct Row {
        double A, B;
        int index;
        double first, second;
        int K;
        bool converged;
    };
    std::vector<std::vector<Row>> per_point(pts.size());
    const bool edges = cfg.sector == "edges";
    const Sector sector = cfg.sector == "antiperiodic" ? Sector::antiperiodic
                                                       : Sector::periodic;

    detail::parallel_for(static_cast<int>(pts.size()), [&](int i) {
        const PendulumParams p = pts[static_cast<size_t>(i)];
        const int K = auto_fourier_K(p.B);
        auto& rows = per_point[static_cast<size_t>(i)];
        if (edges) {
            const BandEdges be = band_edges(p, cfg.order, K);
            for (int n = 0; n <= cfg.order; ++n)
                rows.push_back({p.A, p.B, n, be.a[static_cast<size_t>(n)],
                                be.b[static_cast<size_t>(n)], K, true});
        } else {
            const SpectralResult res =
                sector_spectrum(p, sector, cfg.order + 1, K);
            for (size_t n = 0; n < res.energies.size(); ++n)
                rows.push_back({p.A, p.B, static_cast<int>(n), res.nu,
                                res.energies[n], K,
                                res.convergence[n] <= eigen_convergence_tol});
        }
    });

    const int k_max = detail::max_oracle_K(pts);
    if (cfg.format == "json") {
        json j;
        j["config"] = detail::config_json(cfg, k_max);
        json rows = json::array();
        for (const auto& block : per_point)
            for (const auto& r : block) {
                json e;
                e["A"] = r.A;
                e["B"] = r.B;
                e["index"] = r.index;
                if (edges) {
                    if (std::isnan(r.first))
                        e["a"] = nullptr;
                    else
                        e["a"] = r.first;
                    if (std::isnan(r.second))
                        e["b"] = nullptr;
                    else
                        e["b"] = r.second;
                } else {
                    e["nu"] = r.first;
                    e["energy"] = r.second;
                }
                e["K"] = r.K;
                e["converged"] = r.converged;
                rows.push_back(e);
            }
        j["rows"] = rows;
        out = j.dump(2) + "\n";
        return exit_ok;
    }

    detail::csv_header(out, cfg, k_max);
    out += edges ? "A,B,n,a_n,b_n,K\n" : "A,B,level,nu,energy,K,converged\n";
    for (const auto& block : per_point)
        for (const auto& r : block) {
            out += fmt(r.A) + "," + fmt(r.B) + "," + std::to_string(r.index) +
                   "," + fmt(r.first) + "," + fmt(r.second) + "," +
                   std::to_string(r.K);
            if (!edges) out += r.converged ? ",1" : ",0";
            out += "\n";
        }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// compare: series energy per truncation order against the matrix oracle.
// ---------------------------------------------------------------------------

inline int cmd_compare(const RunConfig& cfg, std::string& out, bool& advisory) {
    const auto pts = detail::evaluation_points(cfg);
    advisory = false;

    struct Row {
        double A, B;
        int order;
        double series, first_omitted, oracle, abs_error;
        int K;
        bool deep;
    };
    std::vector<std::vector<Row>> per_point(pts.size());

    detail::parallel_for(static_cast<int>(pts.size()), [&](int i) {
        const PendulumParams p = pts[static_cast<size_t>(i)];
        const int K = auto_fourier_K(p.B);
        const WellEnergy best = oscillatory_energy_0(p, cfg.mu, cfg.order);
        const double oracle = nearest_level(p, cfg.mu, best.value, K);
        auto& rows = per_point[static_cast<size_t>(i)];
        for (int k = 0; k <= cfg.order; ++k) {
            const WellEnergy we = oscillatory_energy_0(p, cfg.mu, k);
            rows.push_back({p.A, p.B, k, we.value, we.first_omitted, oracle,
                            std::abs(we.value - oracle), K, we.deep_well});
        }
    });

    for (const auto& block : per_point)
        for (const auto& r : block)
            if (!r.deep) advisory = true;

    const int k_max = detail::max_oracle_K(pts);
    if (cfg.format == "json") {
        json j;
        j["config"] = detail::config_json(cfg, k_max);
        json rows = json::array();
        for (const auto& block : per_point)
            for (const auto& r : block) {
                json e;
                e["A"] = r.A;
                e["B"] = r.B;
                e["mu"] = cfg.mu;
                e["order"] = r.order;
                e["series"] = r.series;
                e["first_omitted"] = r.first_omitted;
                e["oracle"] = r.oracle;
                e["abs_error"] = r.abs_error;
                e["K"] = r.K;
                e["deep_well"] = r.deep;
                rows.push_back(e);
            }
        j["rows"] = rows;
        out = j.dump(2) + "\n";
        return exit_ok;
    }

    detail::csv_header(out, cfg, k_max);
    out += "A,B,mu,order,series,first_omitted,oracle,abs_error,K,deep_well\n";
    for (const auto& block : per_point)
        for (const auto& r : block)
            out += fmt(r.A) + "," + fmt(r.B) + "," + std::to_string(cfg.mu) +
                   "," + std::to_string(r.order) + "," + fmt(r.series) + "," +
                   fmt(r.first_omitted) + "," + fmt(r.oracle) + "," +
                   fmt(r.abs_error) + "," + std::to_string(r.K) +
                   (r.deep ? ",1\n" : ",0\n");
    return exit_ok;
}

// ---------------------------------------------------------------------------
// wavefunction: piecewise dump over phi in (0, pi) with region tags. The
// well column is normalized; the barrier column is the raw exp(W) branch,
// so the two agree in the overlap only up to a constant.
// ---------------------------------------------------------------------------

inline int cmd_wavefunction(const RunConfig& cfg, std::string& out,
                            bool& advisory) {
    if (cfg.A.count != 1 || cfg.B.count != 1)
        throw CLI::ValidationError("wavefunction", "expects scalar --A and --B");
    const PendulumParams p{cfg.A.start, cfg.B.start};
    const Well well = cfg.well == "pi" ? Well::pi : Well::zero;
    const WellKind kind = cfg.kind == "S" ? WellKind::S : WellKind::C;
    const int L = cfg.order;
    const int n = cfg.samples > 0 ? cfg.samples : 201;
    advisory = false;

    WellOptions opts;
    opts.L = L;
    WellOptions prev = opts;
    prev.L = std::max(L - 1, 0);

    struct Row {
        double phi;
        const char* region;
        double well_v, barrier_v, value, omitted;
        bool ok;
    };
    std::vector<Row> rows(static_cast<size_t>(n));

    detail::parallel_for(n, [&](int i) {
        const double phi = std::numbers::pi * (i + 1) / (n + 1);
        Row r{};
        r.phi = phi;
        r.region = region_tag(p, cfg.mu, phi);
        r.well_v = well_wavefunction(p, cfg.mu, kind, well, phi, opts);
        const BarrierValue bv = barrier_wavefunction(
            p, cfg.mu, well, BarrierBranch::plus, phi, std::min(L, 2));
        r.barrier_v = bv.value;
        r.ok = bv.region_ok;
        if (std::string_view(r.region) == "barrier") {
            r.value = bv.value;
            const BarrierValue bp = barrier_wavefunction(
                p, cfg.mu, well, BarrierBranch::plus, phi,
                std::max(std::min(L, 2) - 1, 0));
            r.omitted = std::abs(bv.value - bp.value);
        } else {
            r.value = r.well_v;
            const double wp =
                well_wavefunction(p, cfg.mu, kind, well, phi, prev);
            r.omitted = std::abs(r.well_v - wp);
        }
        rows[static_cast<size_t>(i)] = r;
    });

    for (const auto& r : rows)
        if (!r.ok && std::string_view(r.region) != "well") advisory = true;

    const int k_max = auto_fourier_K(p.B);
    if (cfg.format == "json") {
        json j;
        j["config"] = detail::config_json(cfg, k_max);
        json arr = json::array();
        for (const auto& r : rows) {
            json e;
            e["phi"] = r.phi;
            e["region"] = r.region;
            e["well"] = r.well_v;
            e["barrier_plus"] = r.barrier_v;
            e["value"] = r.value;
            e["first_omitted"] = r.omitted;
            e["barrier_region_ok"] = r.ok;
            arr.push_back(e);
        }
        j["rows"] = arr;
        out = j.dump(2) + "\n";
        return exit_ok;
    }

    detail::csv_header(out, cfg, k_max);
    out += "# note=barrier column is the unnormalized growing branch\n";
    out += "phi,region,well,barrier_plus,value,first_omitted,barrier_region_ok\n";
    for (const auto& r : rows)
        out += fmt(r.phi) + "," + r.region + "," + fmt(r.well_v) + "," +
               fmt(r.barrier_v) + "," + fmt(r.value) + "," + fmt(r.omitted) +
               (r.ok ? ",1\n" : ",0\n");
    return exit_ok;
}

// ---------------------------------------------------------------------------
// tunneling: two-level reports over the grid. At A = 0 the report carries
// the oracle doublet gap (levels 2 mu and 2 mu + 1 of the periodic sector)
// next to the model splitting.
// ---------------------------------------------------------------------------

inline int cmd_tunneling(const RunConfig& cfg, std::string& out,
                         bool& advisory) {
    const auto pts = detail::evaluation_points(cfg);
    advisory = false;

    CouplingOptions copt;
    copt.action = parse_action(cfg.action);
    copt.energy_order = cfg.order;

    struct Row {
        SplittingReport rep;
        double oracle_gap = std::numeric_limits<double>::quiet_NaN();
        int K = 0;
    };
    std::vector<Row> rows(pts.size());

    detail::parallel_for(static_cast<int>(pts.size()), [&](int i) {
        const PendulumParams p = pts[static_cast<size_t>(i)];
        Row r;
        r.rep = splitting_report(p, cfg.mu, copt);
        if (p.A == 0.0) {
            r.K = auto_fourier_K(p.B);
            const SpectralResult res =
                sector_spectrum(p, Sector::periodic, 2 * cfg.mu + 2, r.K);
            r.oracle_gap = res.energies[static_cast<size_t>(2 * cfg.mu + 1)] -
                           res.energies[static_cast<size_t>(2 * cfg.mu)];
        }
        rows[static_cast<size_t>(i)] = r;
    });

    for (const auto& r : rows)
        if (!r.rep.deep_well) advisory = true;

    const int k_max = detail::max_oracle_K(pts);
    if (cfg.format == "csv") {
        detail::csv_header(out, cfg, k_max);
        out += "A,B,mu,E0,Epi,gamma,E_plus,E_minus,delta,theta,S_plus,S_minus,"
               "action_value,oracle_gap,K,deep_well\n";
        for (const auto& r : rows) {
            const auto& lv = r.rep.levels;
            out += fmt(r.rep.params.A) + "," + fmt(r.rep.params.B) + "," +
                   std::to_string(cfg.mu) + "," + fmt(lv.E0) + "," +
                   fmt(lv.Epi) + "," + fmt(lv.gamma) + "," + fmt(lv.E_plus) +
                   "," + fmt(lv.E_minus) + "," + fmt(lv.delta) + "," +
                   fmt(lv.theta) + "," + fmt(lv.S_plus) + "," +
                   fmt(lv.S_minus) + "," + fmt(r.rep.action_value) + "," +
                   fmt(r.oracle_gap) + "," + std::to_string(r.K) +
                   (r.rep.deep_well ? ",1\n" : ",0\n");
        }
        return exit_ok;
    }

    json j;
    j["config"] = detail::config_json(cfg, k_max);
    json arr = json::array();
    for (const auto& r : rows) {
        const auto& lv = r.rep.levels;
        json e;
        e["A"] = r.rep.params.A;
        e["B"] = r.rep.params.B;
        e["mu"] = cfg.mu;
        e["E0"] = lv.E0;
        e["Epi"] = lv.Epi;
        e["gamma"] = lv.gamma;
        e["E_plus"] = lv.E_plus;
        e["E_minus"] = lv.E_minus;
        e["delta"] = lv.delta;
        e["theta"] = lv.theta;
        e["S_plus"] = lv.S_plus;
        e["S_minus"] = lv.S_minus;
        e["action"] = cfg.action;
        e["action_value"] = r.rep.action_value;
        e["furry"] = r.rep.furry;
        e["angular_factor"] = r.rep.angular_factor;
        e["energy_order"] = r.rep.energy_order;
        e["deep_well"] = r.rep.deep_well;
        if (std::isnan(r.oracle_gap)) {
            e["oracle_gap"] = nullptr;
            e["oracle_K"] = nullptr;
        } else {
            e["oracle_gap"] = r.oracle_gap;
            e["oracle_K"] = r.K;
        }
        arr.push_back(e);
    }
    j["rows"] = arr;
    out = j.dump(2) + "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"spectral toolkit for the pendulum with an oscillating pivot"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    RunConfig cfg;
    std::string a_text = "0";
    std::string b_text;

    auto add_common = [&](CLI::App* sub, bool b_required) {
        sub->add_option("--A", a_text, "tilt parameter, value or start:stop:count");
        auto* b = sub->add_option("--B", b_text,
                                  "drive parameter, value or start:stop:count");
        if (b_required) b->required();
        sub->add_option("--mu", cfg.mu, "well level index")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--order", cfg.order, "series truncation order")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_flag("--strict", cfg.strict,
                      "treat regime advisories as errors (exit 4)");
        sub->add_option("--seed", cfg.seed, "seed for randomized sweeps");
        sub->add_option("--samples", cfg.samples,
                        "random (A,B) draws, or phi points for wavefunction");
    };

    auto* chart = app.add_subcommand("chart", "band edges or sector levels");
    add_common(chart, true);
    chart->add_option("--sector", cfg.sector, "edges | periodic | antiperiodic")
        ->check(CLI::IsMember({"edges", "periodic", "antiperiodic"}));

    auto* compare = app.add_subcommand("compare", "series vs oracle energies");
    add_common(compare, true);

    auto* wavefn = app.add_subcommand("wavefunction", "piecewise dump");
    add_common(wavefn, true);
    wavefn->add_option("--well", cfg.well, "well center: 0 | pi")
        ->check(CLI::IsMember({"0", "pi"}));
    wavefn->add_option("--kind", cfg.kind, "family: C | S")
        ->check(CLI::IsMember({"C", "S"}));

    auto* tunneling = app.add_subcommand("tunneling", "two-level reports");
    add_common(tunneling, true);
    tunneling
        ->add_option("--action", cfg.action,
                     "barrier action: leading | plus | minus | symmetrized")
        ->check(CLI::IsMember({"leading", "plus", "minus", "symmetrized"}));

    try {
        app.parse(argc, argv);
        cfg.A = parse_grid(a_text);
        cfg.B = parse_grid(b_text);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    if (cfg.command == "tunneling" && !active->count("--format"))
        cfg.format = "json";
    if (cfg.command == "wavefunction" && !active->count("--order"))
        cfg.order = 2;

    std::string out;
    bool advisory = false;
    int rc = exit_ok;
    try {
        if (cfg.command == "chart")
            rc = cmd_chart(cfg, out, advisory);
        else if (cfg.command == "compare")
            rc = cmd_compare(cfg, out, advisory);
        else if (cfg.command == "wavefunction")
            rc = cmd_wavefunction(cfg, out, advisory);
        else
            rc = cmd_tunneling(cfg, out, advisory);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }

    if (cfg.out.empty()) {
        std::fwrite(out.data(), 1, out.size(), stdout);
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot open " << cfg.out << "\n";
            return exit_config;
        }
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
    }
    if (rc == exit_ok && advisory && cfg.strict) return exit_regime;
    return rc;
}

} // namespace kapitza::cli
