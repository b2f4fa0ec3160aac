#include "ghzprism/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

namespace ghz {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double wrap_2pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r;
}
}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial_id)
    : state_(splitmix(seed) ^ splitmix(trial_id * 0xD1B54A32D192ED03ull)) {}

std::uint64_t TrialRng::next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double TrialRng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

void ErrorModel::validate() const {
    for (double p : {detector_efficiency, dark_count_prob, trigger_efficiency})
        if (p < 0.0 || p > 1.0)
            throw std::domain_error("ErrorModel: probability outside [0, 1]");
}

HiddenTuple sample_hidden_discrete(const DiscreteModel& model, TrialRng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < model.tuples.size(); ++i) {
        acc += model.weights[i].to_double();
        if (u < acc) return model.tuples[i];
    }
    return model.tuples.back();  // guards rounding of the cumulative sum
}

ContinuousSampler::ContinuousSampler(const DensitySolution& sol) : sol_(sol) {
    if (sol.residual > 1e-3)
        throw std::domain_error("ContinuousSampler: solution not converged");
    bound_ = sol.max_rho() / 4.0;
    if (bound_ <= 0.0) throw std::domain_error("ContinuousSampler: zero density");
}

ContinuousHidden ContinuousSampler::sample(TrialRng& rng) const {
    for (;;) {
        const std::uint64_t bits = rng.next();
        const int s0 = (bits & 1u) ? 1 : -1;
        const int s1 = (bits & 2u) ? 1 : -1;
        const int s2 = (bits & 4u) ? 1 : -1;
        const double w = rng.uniform() * kTwoPi;
        const double u = rng.uniform();
        const double fv = sol_.f_at(w);
        const double density =
            (s0 * s1 * s2 > 0 ? fv : 0.25 - fv) * sol_.rho_at(w);
        if (u * bound_ >= density) continue;
        ContinuousHidden h;
        h.region_signs = {s0, s1, s2};
        h.x = rng.uniform() * kTwoPi;
        h.y = rng.uniform() * kTwoPi;
        h.z = wrap_2pi(w - h.x - h.y);
        return h;
    }
}

ContinuousHidden sample_hidden_continuous(const DensitySolution& sol, TrialRng& rng) {
    return ContinuousSampler(sol).sample(rng);
}

Outcome station_response(const ContinuousHidden& hidden, Station st, double angle,
                         double delta) {
    const double coord =
        st == Station::A ? hidden.x : (st == Station::B ? hidden.y : hidden.z);
    const double offset = wrap_2pi(coord - angle);
    if (offset > delta) return Outcome::Defective;
    const int sign = hidden.region_signs[static_cast<int>(st)];
    return sign > 0 ? Outcome::Plus : Outcome::Minus;
}

Outcome station_response(const HiddenTuple& hidden, Station st, Angle angle) {
    return hidden.at(st, angle);
}

ErrorOutcome apply_error_model(const std::array<Outcome, 3>& ideal,
                               const ErrorModel& em, TrialRng& rng) {
    em.validate();
    ErrorOutcome out;
    for (int s = 0; s < 3; ++s) {
        Outcome o = ideal[s];
        if (o != Outcome::Defective && rng.uniform() >= em.detector_efficiency)
            o = Outcome::Defective;  // photon lost in the detector
        if (o == Outcome::Defective && em.dark_count_prob > 0.0 &&
            rng.uniform() < em.dark_count_prob) {
            o = rng.sign() > 0 ? Outcome::Plus : Outcome::Minus;
            out.dark_flags[s] = true;
        }
        out.observed[s] = o;
    }
    if (em.trigger_enabled)
        out.trigger_fired = rng.uniform() < em.trigger_efficiency;
    return out;
}

void ExperimentConfig::validate() const {
    errors.validate();
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (n_trials == 0) throw ConfigError("config: N must be > 0");
    if (source == Source::Continuous && solution_path.empty())
        throw ConfigError("config: continuous source requires a solution file");
    if (source == Source::Discrete && schedule == Schedule::RandomAngles)
        throw ConfigError(
            "config: the discrete model defines responses only at angles 0 and "
            "pi/2; random-angle schedules need source=continuous");
    if (source == Source::Discrete && schedule == Schedule::Fixed) {
        const double pi2 = std::numbers::pi / 2.0;
        for (double a : {fixed_setting.alpha, fixed_setting.beta, fixed_setting.gamma})
            if (std::abs(a) > 1e-9 && std::abs(a - pi2) > 1e-9)
                throw ConfigError(
                    "config: fixed discrete setting angles must be 0 or pi/2");
    }
}

int sign_index(const OutcomeSign& signs) {
    return ((signs.i < 0) << 2) | ((signs.j < 0) << 1) | (signs.k < 0);
}

void SettingBin::merge(const SettingBin& other) {
    n_emitted += other.n_emitted;
    n_triple += other.n_triple;
    n_fourfold += other.n_fourfold;
    for (int m = 0; m < 8; ++m) {
        counts_triple[m] += other.counts_triple[m];
        counts_fourfold[m] += other.counts_fourfold[m];
    }
}

SettingKey setting_key(const ContinuousSettings& s) {
    return {s.alpha, s.beta, s.gamma};
}

SettingKey setting_key(const DiscreteSetting& s) {
    return {angle_radians(s.x), angle_radians(s.y), angle_radians(s.z)};
}

void CoincidenceStats::add(const TrialRecord& rec) {
    ++n_emitted;
    SettingBin& bin = bins[setting_key(rec.settings)];
    ++bin.n_emitted;
    const bool triple = rec.observed[0] != Outcome::Defective &&
                        rec.observed[1] != Outcome::Defective &&
                        rec.observed[2] != Outcome::Defective;
    if (!triple) return;
    const OutcomeSign signs{outcome_value(rec.observed[0]),
                            outcome_value(rec.observed[1]),
                            outcome_value(rec.observed[2])};
    const int idx = sign_index(signs);
    ++n_triple;
    ++bin.n_triple;
    ++bin.counts_triple[idx];
    if (rec.trigger_fired) {
        ++n_fourfold;
        ++bin.n_fourfold;
        ++bin.counts_fourfold[idx];
    }
}

void CoincidenceStats::merge(const CoincidenceStats& other) {
    n_emitted += other.n_emitted;
    n_triple += other.n_triple;
    n_fourfold += other.n_fourfold;
    trigger_enabled = trigger_enabled || other.trigger_enabled;
    for (const auto& [key, bin] : other.bins) bins[key].merge(bin);
}

std::uint64_t CoincidenceStats::selected(const SettingBin& bin) const {
    return trigger_enabled ? bin.n_fourfold : bin.n_triple;
}

const std::array<std::uint64_t, 8>& CoincidenceStats::selected_counts(
    const SettingBin& bin) const {
    return trigger_enabled ? bin.counts_fourfold : bin.counts_triple;
}

double CoincidenceStats::conditional(const SettingKey& key,
                                     const OutcomeSign& signs) const {
    const auto it = bins.find(key);
    if (it == bins.end() || selected(it->second) == 0)
        throw InsufficientData("no post-selected trials at the requested setting");
    return static_cast<double>(selected_counts(it->second)[sign_index(signs)]) /
           static_cast<double>(selected(it->second));
}

double CoincidenceStats::expectation(const SettingKey& key) const {
    const auto it = bins.find(key);
    if (it == bins.end() || selected(it->second) == 0)
        throw InsufficientData("no post-selected trials at the requested setting");
    const auto& counts = selected_counts(it->second);
    std::int64_t acc = 0;
    for (const OutcomeSign& s : OutcomeSign::all())
        acc += s.product() * static_cast<std::int64_t>(counts[sign_index(s)]);
    return static_cast<double>(acc) / static_cast<double>(selected(it->second));
}

std::array<double, 4> CoincidenceStats::omega_expectations() const {
    std::array<double, 4> e{};
    for (const ProductObservable& obs : ProductObservable::all()) {
        try {
            e[obs.id - 1] = expectation(setting_key(obs.setting));
        } catch (const InsufficientData&) {
            throw InsufficientData("no post-selected trials at the Omega_" +
                                   std::to_string(obs.id) + " setting");
        }
    }
    return e;
}

double CoincidenceStats::epsilon() const {
    const auto e = omega_expectations();
    return 1.0 - (e[0] + e[1] + e[2]) / 3.0;
}

double CoincidenceStats::dbs_statistic() const {
    const auto e = omega_expectations();
    return e[0] + e[1] + e[2] - e[3];
}

CoincidenceStats estimate_stats(const std::vector<TrialRecord>& records,
                                bool trigger_enabled) {
    if (records.empty()) throw InsufficientData("estimate_stats: no trial records");
    CoincidenceStats stats;
    stats.trigger_enabled = trigger_enabled;
    for (const TrialRecord& rec : records) stats.add(rec);
    return stats;
}

namespace {

Angle angle_from_radians(double a) {
    if (std::abs(a) <= 1e-9) return Angle::Zero;
    if (std::abs(a - std::numbers::pi / 2.0) <= 1e-9) return Angle::HalfPi;
    throw ConfigError("discrete source: angle is neither 0 nor pi/2");
}

TrialRecord simulate_trial(const ExperimentConfig& cfg, std::uint64_t trial_id,
                           const DiscreteModel* discrete,
                           const ContinuousSampler* sampler, double window_delta) {
    TrialRng rng(cfg.seed, trial_id);
    TrialRecord rec;
    rec.trial_id = trial_id;

    switch (cfg.schedule) {
        case Schedule::Fixed:
            rec.settings = cfg.fixed_setting;
            break;
        case Schedule::Cycle8: {
            const DiscreteSetting& s = DiscreteSetting::all()[trial_id % 8];
            rec.settings = {angle_radians(s.x), angle_radians(s.y), angle_radians(s.z)};
            break;
        }
        case Schedule::RandomAngles:
            rec.settings = {rng.uniform() * kTwoPi, rng.uniform() * kTwoPi,
                            rng.uniform() * kTwoPi};
            break;
    }

    const std::array<double, 3> angles = {rec.settings.alpha, rec.settings.beta,
                                          rec.settings.gamma};
    if (cfg.source == ExperimentConfig::Source::Discrete) {
        const HiddenTuple tuple = sample_hidden_discrete(*discrete, rng);
        for (int s = 0; s < 3; ++s)
            rec.ideal[s] = station_response(tuple, static_cast<Station>(s),
                                            angle_from_radians(angles[s]));
    } else {
        const ContinuousHidden hidden = sampler->sample(rng);
        for (int s = 0; s < 3; ++s)
            rec.ideal[s] = station_response(hidden, static_cast<Station>(s), angles[s],
                                            window_delta);
    }
    const ErrorOutcome err = apply_error_model(rec.ideal, cfg.errors, rng);
    rec.observed = err.observed;
    rec.dark_flags = err.dark_flags;
    rec.trigger_fired = err.trigger_fired;
    return rec;
}

}  // namespace

CoincidenceStats run_experiment(const ExperimentConfig& cfg,
                                const DiscreteModel* discrete,
                                const DensitySolution* continuous,
                                const RecordSink& sink) {
    cfg.validate();
    if (cfg.source == ExperimentConfig::Source::Discrete && discrete == nullptr)
        throw ConfigError("run_experiment: discrete source requires a model");
    if (cfg.source == ExperimentConfig::Source::Continuous && continuous == nullptr)
        throw ConfigError("run_experiment: continuous source requires a solution");

    const ContinuousSampler* sampler = nullptr;
    std::unique_ptr<ContinuousSampler> sampler_holder;
    if (continuous != nullptr) {
        sampler_holder = std::make_unique<ContinuousSampler>(*continuous);
        sampler = sampler_holder.get();
    }
    const double window_delta = continuous != nullptr ? continuous->delta : 0.0;

    const std::uint64_t chunk_size = 1u << 16;
    const std::uint64_t n_chunks = (cfg.n_trials + chunk_size - 1) / chunk_size;
    const int threads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.threads), n_chunks));

    std::vector<CoincidenceStats> partial(threads);
    std::vector<std::vector<TrialRecord>> chunk_records;
    if (sink) chunk_records.resize(n_chunks);

    std::atomic<std::uint64_t> next_chunk{0};
    auto worker = [&](int tid) {
        CoincidenceStats& stats = partial[tid];
        stats.trigger_enabled = cfg.errors.trigger_enabled;
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            const std::uint64_t begin = c * chunk_size;
            const std::uint64_t end = std::min(begin + chunk_size, cfg.n_trials);
            if (sink) chunk_records[c].reserve(end - begin);
            for (std::uint64_t id = begin; id < end; ++id) {
                const TrialRecord rec =
                    simulate_trial(cfg, id, discrete, sampler, window_delta);
                stats.add(rec);
                if (sink) chunk_records[c].push_back(rec);
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
        for (std::thread& th : pool) th.join();
    }

    CoincidenceStats stats;
    stats.trigger_enabled = cfg.errors.trigger_enabled;
    for (const CoincidenceStats& p : partial) stats.merge(p);

    if (sink)
        for (const auto& chunk : chunk_records)
            for (const TrialRecord& rec : chunk) sink(rec);
    return stats;
}

}  // namespace ghz
