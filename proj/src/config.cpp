#include "ghzprism/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ghz {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text) {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
}

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

int outcome_code(Outcome o) {
    return o == Outcome::Defective ? 0 : outcome_value(o);
}

}  // namespace

double parse_angle(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty angle");
    bool has_pi = false;
    if (s.size() >= 2) {
        std::string tail = s.substr(s.size() - 2);
        for (char& c : tail) c = static_cast<char>(std::tolower(c));
        if (tail == "pi") {
            has_pi = true;
            s = trim(s.substr(0, s.size() - 2));
        }
    }
    if (!has_pi) return parse_number(s);
    if (s.empty()) return std::numbers::pi;
    if (s == "-") return -std::numbers::pi;
    return parse_number(s) * std::numbers::pi;
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    bool have_source = false;
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& msg) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "source") {
                if (value == "discrete") cfg.source = ExperimentConfig::Source::Discrete;
                else if (value == "continuous")
                    cfg.source = ExperimentConfig::Source::Continuous;
                else fail("source must be discrete or continuous");
                have_source = true;
            } else if (key == "solution") {
                cfg.solution_path = value;
            } else if (key == "schedule") {
                if (value == "cycle8") cfg.schedule = Schedule::Cycle8;
                else if (value == "fixed") cfg.schedule = Schedule::Fixed;
                else if (value == "random") cfg.schedule = Schedule::RandomAngles;
                else fail("schedule must be cycle8, fixed or random");
            } else if (key == "alpha") {
                cfg.fixed_setting.alpha = parse_angle(value);
            } else if (key == "beta") {
                cfg.fixed_setting.beta = parse_angle(value);
            } else if (key == "gamma") {
                cfg.fixed_setting.gamma = parse_angle(value);
            } else if (key == "d") {
                cfg.errors.detector_efficiency = parse_number(value);
                if (cfg.errors.detector_efficiency < 0.0 ||
                    cfg.errors.detector_efficiency > 1.0)
                    fail("d must lie in [0, 1]");
            } else if (key == "dark") {
                cfg.errors.dark_count_prob = parse_number(value);
                if (cfg.errors.dark_count_prob < 0.0 || cfg.errors.dark_count_prob > 1.0)
                    fail("dark must lie in [0, 1]");
            } else if (key == "trigger") {
                if (value == "on") cfg.errors.trigger_enabled = true;
                else if (value == "off") cfg.errors.trigger_enabled = false;
                else fail("trigger must be on or off");
            } else if (key == "trigger_eff") {
                cfg.errors.trigger_efficiency = parse_number(value);
                if (cfg.errors.trigger_efficiency < 0.0 ||
                    cfg.errors.trigger_efficiency > 1.0)
                    fail("trigger_eff must lie in [0, 1]");
            } else if (key == "N") {
                const double n = parse_number(value);
                if (n < 1 || n != std::floor(n)) fail("N must be a positive integer");
                cfg.n_trials = static_cast<std::uint64_t>(n);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
                if (cfg.threads < 1) fail("threads must be >= 1");
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail("bad value for '" + key + "': " + e.what());
        }
    }
    if (!have_source) throw ConfigError(origin + ": missing required key 'source'");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in, path);
}

void write_stats(const CoincidenceStats& stats, std::ostream& out) {
    out << "format=ghzprism-stats-v1\n";
    out << "trigger_enabled=" << (stats.trigger_enabled ? 1 : 0) << "\n";
    out << "n_emitted=" << stats.n_emitted << "\n";
    out << "n_triple=" << stats.n_triple << "\n";
    out << "n_fourfold=" << stats.n_fourfold << "\n";
    out << "n_settings=" << stats.bins.size() << "\n";
    for (const auto& [key, bin] : stats.bins) {
        out << "setting alpha=" << fmt(key.alpha) << " beta=" << fmt(key.beta)
            << " gamma=" << fmt(key.gamma) << " n_emitted=" << bin.n_emitted
            << " n_triple=" << bin.n_triple << " n_fourfold=" << bin.n_fourfold;
        out << " counts_triple=";
        for (int m = 0; m < 8; ++m) out << (m ? ";" : "") << bin.counts_triple[m];
        out << " counts_fourfold=";
        for (int m = 0; m < 8; ++m) out << (m ? ";" : "") << bin.counts_fourfold[m];
        out << "\n";
    }
    try {
        const auto e = stats.omega_expectations();
        out << "E1=" << fmt(e[0], "%.12g") << "\n";
        out << "E2=" << fmt(e[1], "%.12g") << "\n";
        out << "E3=" << fmt(e[2], "%.12g") << "\n";
        out << "E4=" << fmt(e[3], "%.12g") << "\n";
        out << "epsilon=" << fmt(stats.epsilon(), "%.12g") << "\n";
        out << "dbs_statistic=" << fmt(stats.dbs_statistic(), "%.12g") << "\n";
    } catch (const InsufficientData&) {
        // Omega settings not covered by this run; counts above are complete.
    }
}

void save_stats(const CoincidenceStats& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_stats: cannot open " + path);
    write_stats(stats, out);
}

CoincidenceStats load_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_stats: cannot open " + path);
    CoincidenceStats stats;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("setting ", 0) == 0) {
            std::istringstream ls(line.substr(8));
            SettingKey key;
            SettingBin bin;
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = tok.substr(0, eq);
                const std::string v = tok.substr(eq + 1);
                if (k == "alpha") key.alpha = std::stod(v);
                else if (k == "beta") key.beta = std::stod(v);
                else if (k == "gamma") key.gamma = std::stod(v);
                else if (k == "n_emitted") bin.n_emitted = std::stoull(v);
                else if (k == "n_triple") bin.n_triple = std::stoull(v);
                else if (k == "n_fourfold") bin.n_fourfold = std::stoull(v);
                else if (k == "counts_triple" || k == "counts_fourfold") {
                    std::istringstream cs(v);
                    std::string num;
                    int m = 0;
                    while (std::getline(cs, num, ';') && m < 8) {
                        (k == "counts_triple" ? bin.counts_triple
                                              : bin.counts_fourfold)[m++] =
                            std::stoull(num);
                    }
                }
            }
            stats.bins[key] = bin;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = line.substr(0, eq);
        const std::string v = line.substr(eq + 1);
        if (k == "trigger_enabled") stats.trigger_enabled = v == "1";
        else if (k == "n_emitted") stats.n_emitted = std::stoull(v);
        else if (k == "n_triple") stats.n_triple = std::stoull(v);
        else if (k == "n_fourfold") stats.n_fourfold = std::stoull(v);
        // E*/epsilon/dbs lines are derived values; recomputed on demand.
    }
    return stats;
}

std::string trial_csv_header() {
    return "trial_id,alpha,beta,gamma,a_ideal,b_ideal,c_ideal,"
           "a_obs,b_obs,c_obs,dark_a,dark_b,dark_c,trigger";
}

std::string trial_csv_row(const TrialRecord& rec) {
    std::ostringstream os;
    os << rec.trial_id << ',' << fmt(rec.settings.alpha) << ','
       << fmt(rec.settings.beta) << ',' << fmt(rec.settings.gamma);
    for (int s = 0; s < 3; ++s) os << ',' << outcome_code(rec.ideal[s]);
    for (int s = 0; s < 3; ++s) os << ',' << outcome_code(rec.observed[s]);
    for (int s = 0; s < 3; ++s) os << ',' << (rec.dark_flags[s] ? 1 : 0);
    os << ',' << (rec.trigger_fired ? 1 : 0);
    return os.str();
}

}  // namespace ghz
