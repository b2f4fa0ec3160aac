#pragma once

#include <iosfwd>
#include <string>

#include "ghzprism/simulator.hpp"

namespace ghz {

// Radians with "pi"-literal support: "0.3pi", "pi", "1.5708", "-0.5pi".
double parse_angle(const std::string& text);

// key=value experiment configuration ('#' comments, blank lines allowed).
// Keys: source, solution, schedule, alpha, beta, gamma, d, dark, trigger,
// trigger_eff, N, seed, threads. Unknown keys and bad values raise a
// ConfigError naming the line.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin);

// Deterministic structured-text stats file; byte-identical for identical
// counts regardless of thread count.
void write_stats(const CoincidenceStats& stats, std::ostream& out);
void save_stats(const CoincidenceStats& stats, const std::string& path);
CoincidenceStats load_stats(const std::string& path);

// Trial log CSV row/header (outcomes encoded +1 / -1 / 0).
std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& rec);

}  // namespace ghz
