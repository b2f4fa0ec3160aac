#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ghzprism/config.hpp"
#include "ghzprism/continuous.hpp"
#include "ghzprism/discrete_model.hpp"
#include "ghzprism/enumerator.hpp"
#include "ghzprism/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerificationFailed = 2;
constexpr int kExitSolverFailed = 3;

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string setting_str(const ghz::DiscreteSetting& s) {
    const auto name = [](ghz::Angle a) { return a == ghz::Angle::HalfPi ? "pi/2" : "0"; };
    return std::string("(") + name(s.x) + "," + name(s.y) + "," + name(s.z) + ")";
}

int cmd_enumerate(bool counts, const std::string& table_out,
                  const std::string& fixture) {
    const ghz::Partition p = ghz::classify_allowed();
    if (counts || (table_out.empty() && fixture.empty())) {
        std::cout << "total=" << p.total << " allowed=" << p.allowed;
        for (const auto& [k, v] : p.by_coincidence_count) std::cout << " c" << k << "=" << v;
        std::cout << "\n";
    }
    const auto lambda = ghz::build_lambda48();
    if (!table_out.empty()) {
        std::ofstream out(table_out);
        if (!out) throw std::runtime_error("cannot open " + table_out);
        for (const auto& t : lambda) out << ghz::format_tuple(t) << "\n";
    }
    if (!fixture.empty()) {
        std::ifstream in(fixture);
        if (!in) throw std::runtime_error("cannot open fixture " + fixture);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) lines.push_back(line);
        bool match = lines.size() == lambda.size();
        std::size_t first_mismatch = 0;
        if (match) {
            for (std::size_t i = 0; i < lambda.size(); ++i)
                if (lines[i] != ghz::format_tuple(lambda[i])) {
                    match = false;
                    first_mismatch = i + 1;
                    break;
                }
        }
        std::cout << "fixture " << fixture << ": "
                  << (match ? "match" : "MISMATCH") << "\n";
        if (!match) {
            if (first_mismatch)
                std::cout << "first mismatch at line " << first_mismatch << "\n";
            return kExitVerificationFailed;
        }
    }
    return kExitOk;
}

int cmd_verify(const std::string& report_path) {
    const auto model = ghz::DiscreteModel::uniform48();
    const auto report = ghz::verify_against_quantum(model);
    bool ok = report.all_match();

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot open " + report_path);
        for (const auto& c : report.cases)
            out << setting_str(c.setting) << " (" << (c.signs.i > 0 ? '+' : '-')
                << (c.signs.j > 0 ? '+' : '-') << (c.signs.k > 0 ? '+' : '-') << ") "
                << c.model_value.str() << " " << c.quantum_value.str() << " "
                << (c.match ? "match" : "MISMATCH") << "\n";
    }
    std::cout << report.matches << "/" << report.cases.size() << " exact\n";

    for (const auto& s : ghz::DiscreteSetting::all()) {
        if (ghz::triple_efficiency(model, s) != ghz::Rational(1, 2)) {
            std::cout << "triple efficiency mismatch at " << setting_str(s) << "\n";
            ok = false;
        }
    }
    std::array<double, 4> e{};
    for (const auto& obs : ghz::ProductObservable::all()) {
        const ghz::Rational ev = ghz::product_expectation(model, obs.setting);
        e[obs.id - 1] = ev.to_double();
        const ghz::Rational want(obs.required_value);
        if (ev != want) {
            std::cout << "E(Omega_" << obs.id << ") = " << ev.str() << ", expected "
                      << want.str() << "\n";
            ok = false;
        }
    }
    const auto ineq = ghz::dbs_inequality(e[0], e[1], e[2], e[3]);
    std::cout << "E(Omega_1..4) = " << e[0] << " " << e[1] << " " << e[2] << " " << e[3]
              << "; statistic = " << ineq.statistic << " ("
              << (ineq.satisfied ? "within" : "violates") << " the two-valued bound)\n";
    if (ineq.statistic != 4.0) ok = false;
    return ok ? kExitOk : kExitVerificationFailed;
}

void write_curve_csv(const std::string& path, const std::string& header,
                     const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << header << "\n";
    for (const auto& [x, y] : rows) out << fmt(x, "%.17g") << "," << fmt(y, "%.17g") << "\n";
}

int cmd_solve(const std::string& delta_text, int grid, double tol, int max_iter,
              const std::string& out_path, const std::string& figs_prefix) {
    const double delta = ghz::parse_angle(delta_text);
    const auto sol = ghz::solve_densities(ghz::WindowWidth(delta), grid, tol, max_iter);
    std::cout << "converged: residual=" << fmt(sol.residual, "%.3g")
              << " omega=" << fmt(sol.single_efficiency()) << "\n";
    if (!out_path.empty()) ghz::save_solution(sol, out_path);
    if (!figs_prefix.empty()) {
        std::vector<std::pair<double, double>> f_rows, rho_rows;
        std::ofstream fit(figs_prefix + "fit.csv");
        if (!fit) throw std::runtime_error("cannot open fit csv");
        fit << "w,lhs,rhs\n";
        for (int j = 0; j < sol.grid_n; ++j) {
            f_rows.emplace_back(sol.w[j], sol.f[j]);
            rho_rows.emplace_back(sol.w[j], sol.rho[j]);
            fit << fmt(sol.w[j], "%.17g") << "," << fmt(ghz::lhs_ratio(sol, sol.w[j]), "%.17g")
                << "," << fmt(ghz::target_rhs(sol.w[j]), "%.17g") << "\n";
        }
        write_curve_csv(figs_prefix + "f.csv", "w,f", f_rows);
        write_curve_csv(figs_prefix + "rho.csv", "w,rho", rho_rows);
    }
    return kExitOk;
}

int cmd_curve(const std::string& solution_path, const std::string& out_path,
              int points) {
    const auto sol = ghz::load_solution(solution_path);
    const auto curve = ghz::triple_efficiency_curve(sol, points);
    write_curve_csv(out_path, "w,p_triple", curve);
    double min = curve.front().second;
    for (const auto& [w, p] : curve) min = std::min(min, p);
    const double omega = sol.single_efficiency();
    std::cout << "min p_triple=" << fmt(min) << " omega^3=" << fmt(omega * omega * omega)
              << "\n";
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& stats_path,
                 const std::string& log_path, int threads_override) {
    ghz::ExperimentConfig cfg = ghz::load_config(config_path);
    if (threads_override > 0) cfg.threads = threads_override;

    ghz::DiscreteModel model;
    ghz::DensitySolution sol;
    const ghz::DiscreteModel* model_ptr = nullptr;
    const ghz::DensitySolution* sol_ptr = nullptr;
    if (cfg.source == ghz::ExperimentConfig::Source::Discrete) {
        model = ghz::DiscreteModel::uniform48();
        model_ptr = &model;
    } else {
        sol = ghz::load_solution(cfg.solution_path);
        sol_ptr = &sol;
    }

    std::ofstream log;
    ghz::RecordSink sink;
    if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw std::runtime_error("cannot open " + log_path);
        log << ghz::trial_csv_header() << "\n";
        sink = [&log](const ghz::TrialRecord& rec) {
            log << ghz::trial_csv_row(rec) << "\n";
        };
    }

    const auto stats = ghz::run_experiment(cfg, model_ptr, sol_ptr, sink);
    if (!stats_path.empty()) ghz::save_stats(stats, stats_path);
    ghz::write_stats(stats, std::cout);
    return kExitOk;
}

int cmd_report(const std::string& stats_path) {
    const auto stats = ghz::load_stats(stats_path);
    std::cout << "emitted trials:      " << stats.n_emitted << "\n";
    std::cout << "triple coincidences: " << stats.n_triple;
    if (stats.n_emitted)
        std::cout << "  (" << fmt(static_cast<double>(stats.n_triple) / stats.n_emitted)
                  << " per emission)";
    std::cout << "\n";
    if (stats.trigger_enabled)
        std::cout << "four-fold selected:  " << stats.n_fourfold << "\n";
    std::cout << "settings observed:   " << stats.bins.size() << "\n";
    for (const auto& [key, bin] : stats.bins) {
        std::cout << "  (" << fmt(key.alpha, "%.6g") << ", " << fmt(key.beta, "%.6g")
                  << ", " << fmt(key.gamma, "%.6g") << "): emitted " << bin.n_emitted
                  << ", triple " << bin.n_triple;
        const std::uint64_t sel = stats.selected(bin);
        if (sel > 0) {
            std::cout << ", conditionals";
            const auto& counts = stats.selected_counts(bin);
            for (int m = 0; m < 8; ++m)
                std::cout << " " << fmt(static_cast<double>(counts[m]) / sel, "%.4f");
        }
        std::cout << "\n";
    }
    try {
        const auto e = stats.omega_expectations();
        std::cout << "E(Omega_1..4): " << fmt(e[0]) << " " << fmt(e[1]) << " " << fmt(e[2])
                  << " " << fmt(e[3]) << "\n";
        std::cout << "epsilon:       " << fmt(stats.epsilon()) << "\n";
        std::cout << "dbs statistic: " << fmt(stats.dbs_statistic())
                  << "  (two-valued LHV bound: |.| <= 2)\n";
    } catch (const ghz::InsufficientData&) {
        std::cout << "(Omega settings not covered; no inequality estimate)\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GHZ prism-model toolkit: enumeration, exact verification, "
                 "continuum densities and event-by-event simulation"};
    app.require_subcommand(1);

    auto* enumerate = app.add_subcommand("enumerate", "enumerate and classify {+,-,D}^6");
    bool counts = false;
    std::string table_out, fixture;
    enumerate->add_flag("--counts", counts, "print the partition counts");
    enumerate->add_option("--table-out", table_out, "write the 48-tuple set to a file");
    enumerate->add_option("--fixture", fixture, "compare against a golden tuple list");

    auto* verify = app.add_subcommand("verify", "exact checks of the 48-tuple model");
    std::string report_path;
    verify->add_option("--report", report_path, "write the 64-case report to a file");

    auto* solve = app.add_subcommand("solve", "solve the continuum density equation");
    std::string delta_text = "0.3pi", sol_out, figs_prefix;
    int grid = 1024, max_iter = 600;
    double tol = 1e-3;
    solve->add_option("--delta", delta_text, "window width (radians, 'pi' literals ok)");
    solve->add_option("--grid", grid, "grid points per period");
    solve->add_option("--tol", tol, "max residual tolerance");
    solve->add_option("--max-iter", max_iter, "iteration budget");
    solve->add_option("--out", sol_out, "solution JSON output path");
    solve->add_option("--figs", figs_prefix, "prefix for f/rho/fit CSV outputs");

    auto* curve = app.add_subcommand("curve", "triple-efficiency curve from a solution");
    std::string curve_solution, curve_out = "triple_efficiency.csv";
    int curve_points = 1024;
    curve->add_option("--solution", curve_solution, "solution JSON path")->required();
    curve->add_option("--out", curve_out, "CSV output path");
    curve->add_option("--points", curve_points, "samples over one period");

    auto* simulate = app.add_subcommand("simulate", "run an event-by-event experiment");
    std::string sim_config, sim_stats, sim_log;
    int sim_threads = 0;
    simulate->add_option("--config", sim_config, "key=value config file")->required();
    simulate->add_option("--stats", sim_stats, "stats output path");
    simulate->add_option("--log", sim_log, "trial log CSV path");
    simulate->add_option("--threads", sim_threads, "override thread count");

    auto* report = app.add_subcommand("report", "summarize a stats file");
    std::string report_stats;
    report->add_option("--stats", report_stats, "stats file path")->required();

    try {
        app.parse(argc, argv);
        if (enumerate->parsed()) return cmd_enumerate(counts, table_out, fixture);
        if (verify->parsed()) return cmd_verify(report_path);
        if (solve->parsed())
            return cmd_solve(delta_text, grid, tol, max_iter, sol_out, figs_prefix);
        if (curve->parsed()) return cmd_curve(curve_solution, curve_out, curve_points);
        if (simulate->parsed())
            return cmd_simulate(sim_config, sim_stats, sim_log, sim_threads);
        if (report->parsed()) return cmd_report(report_stats);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ghz::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailed;
    } catch (const ghz::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
