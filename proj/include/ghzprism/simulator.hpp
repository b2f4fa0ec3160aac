#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ghzprism/continuous.hpp"
#include "ghzprism/core.hpp"
#include "ghzprism/discrete_model.hpp"

namespace ghz {

// Counter-based per-trial random stream: the state is derived from
// (seed, trial_id) alone, so trials are independent of execution order
// and can run on any number of threads with identical results.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial_id);

    std::uint64_t next();
    double uniform();  // [0, 1)
    int sign() { return (next() & 1u) ? 1 : -1; }

private:
    std::uint64_t state_;
};

// External (instrumental) error model on top of the prism-determined outcomes.
struct ErrorModel {
    double detector_efficiency{1.0};
    double dark_count_prob{0.0};
    bool trigger_enabled{false};
    double trigger_efficiency{1.0};

    void validate() const;
};

// A sampled point of the continuum hidden-variable space: one of the eight
// sign regions plus cube coordinates.
struct ContinuousHidden {
    std::array<int, 3> region_signs{1, 1, 1};
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

struct TrialRecord {
    std::uint64_t trial_id{0};
    ContinuousSettings settings;
    std::array<Outcome, 3> ideal{};
    std::array<Outcome, 3> observed{};
    std::array<bool, 3> dark_flags{};
    bool trigger_fired{false};
};

HiddenTuple sample_hidden_discrete(const DiscreteModel& model, TrialRng& rng);

// Rejection sampler over (region, w = x+y+z) against the bound max(rho)/4,
// with the density bound cached across calls.
class ContinuousSampler {
public:
    explicit ContinuousSampler(const DensitySolution& sol);
    ContinuousHidden sample(TrialRng& rng) const;

private:
    const DensitySolution& sol_;
    double bound_;
};

ContinuousHidden sample_hidden_continuous(const DensitySolution& sol, TrialRng& rng);

// Fires with the region's sign iff the station coordinate lies in
// [angle, angle + delta] modulo 2 pi; Defective otherwise.
Outcome station_response(const ContinuousHidden& hidden, Station st, double angle,
                         double delta);
Outcome station_response(const HiddenTuple& hidden, Station st, Angle angle);

struct ErrorOutcome {
    std::array<Outcome, 3> observed{};
    std::array<bool, 3> dark_flags{};
    bool trigger_fired{false};
};

// Each ideal firing survives independently with the detector efficiency;
// a silent detector dark-fires with the dark-count probability (uniform
// random sign); the trigger is an independent detector.
ErrorOutcome apply_error_model(const std::array<Outcome, 3>& ideal,
                               const ErrorModel& em, TrialRng& rng);

enum class Schedule : std::uint8_t { Fixed, Cycle8, RandomAngles };

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
    enum class Source : std::uint8_t { Discrete, Continuous };

    Source source{Source::Discrete};
    Schedule schedule{Schedule::Cycle8};
    ContinuousSettings fixed_setting{};  // used when schedule == Fixed
    ErrorModel errors{};
    std::uint64_t n_trials{1000000};
    std::uint64_t seed{1};
    int threads{1};
    std::string solution_path;  // continuous source only

    void validate() const;  // throws ConfigError
};

struct SettingKey {
    double alpha{0.0};
    double beta{0.0};
    double gamma{0.0};

    friend auto operator<=>(const SettingKey&, const SettingKey&) = default;
};

// Index of a sign triple in count arrays.
int sign_index(const OutcomeSign& signs);

struct SettingBin {
    std::uint64_t n_emitted{0};
    std::uint64_t n_triple{0};
    std::array<std::uint64_t, 8> counts_triple{};
    std::uint64_t n_fourfold{0};
    std::array<std::uint64_t, 8> counts_fourfold{};

    void merge(const SettingBin& other);
};

// Aggregated post-selected statistics, binned by setting. Counts are plain
// integers, so merging is exact and order-invariant.
struct CoincidenceStats {
    std::uint64_t n_emitted{0};
    std::uint64_t n_triple{0};
    std::uint64_t n_fourfold{0};
    bool trigger_enabled{false};
    std::map<SettingKey, SettingBin> bins;

    void add(const TrialRecord& rec);
    void merge(const CoincidenceStats& other);

    // Post-selected count for a bin: four-fold when the trigger was on,
    // triple otherwise.
    std::uint64_t selected(const SettingBin& bin) const;
    const std::array<std::uint64_t, 8>& selected_counts(const SettingBin& bin) const;

    // Estimated conditional probability of a sign triple at a setting.
    double conditional(const SettingKey& key, const OutcomeSign& signs) const;
    // Estimated product expectation at a setting.
    double expectation(const SettingKey& key) const;
    // E(Omega_1..4); requires the four omega settings in the bins.
    std::array<double, 4> omega_expectations() const;
    double epsilon() const;        // 1 - (E1 + E2 + E3) / 3
    double dbs_statistic() const;  // E1 + E2 + E3 - E4
};

CoincidenceStats estimate_stats(const std::vector<TrialRecord>& records,
                                bool trigger_enabled = false);

SettingKey setting_key(const ContinuousSettings& s);
SettingKey setting_key(const DiscreteSetting& s);

using RecordSink = std::function<void(const TrialRecord&)>;

// Runs n_trials emissions. Deterministic given (seed, config) for any
// thread count; records reach the sink in trial_id order.
CoincidenceStats run_experiment(const ExperimentConfig& cfg,
                                const DiscreteModel* discrete,
                                const DensitySolution* continuous,
                                const RecordSink& sink = nullptr);

}  // namespace ghz
