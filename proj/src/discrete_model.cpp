#include "ghzprism/discrete_model.hpp"

#include "ghzprism/enumerator.hpp"

namespace ghz {

DiscreteModel DiscreteModel::uniform48() { return uniform(build_lambda48()); }

DiscreteModel DiscreteModel::uniform(std::vector<HiddenTuple> tuples) {
    DiscreteModel m;
    const auto n = static_cast<std::int64_t>(tuples.size());
    m.tuples = std::move(tuples);
    m.weights.assign(m.tuples.size(), Rational(1, n));
    return m;
}

void DiscreteModel::validate() const {
    if (tuples.size() != weights.size())
        throw std::invalid_argument("DiscreteModel: tuples/weights size mismatch");
    Rational sum;
    for (const Rational& w : weights) {
        if (w < Rational(0)) throw std::invalid_argument("DiscreteModel: negative weight");
        sum += w;
    }
    if (sum != Rational(1))
        throw std::invalid_argument("DiscreteModel: weights sum to " + sum.str());
}

EventCondition& EventCondition::require(Station st, Angle ang, Requirement r) {
    station[static_cast<int>(st)] = Term{ang, r};
    return *this;
}

void EventCondition::validate() const {
    if (!station[0] && !station[1] && !station[2])
        throw std::invalid_argument("EventCondition: no requirement");
}

namespace {

bool matches(const HiddenTuple& t, const EventCondition& cond) {
    for (int s = 0; s < 3; ++s) {
        const auto& term = cond.station[s];
        if (!term) continue;
        const Outcome o = t.at(static_cast<Station>(s), term->angle);
        switch (term->req) {
            case Requirement::Plus:
                if (o != Outcome::Plus) return false;
                break;
            case Requirement::Minus:
                if (o != Outcome::Minus) return false;
                break;
            case Requirement::NonDefective:
                if (o == Outcome::Defective) return false;
                break;
        }
    }
    return true;
}

bool in_triple(const HiddenTuple& t, const DiscreteSetting& s) {
    for (int i : s.slot_indices())
        if (t.slots[i] == Outcome::Defective) return false;
    return true;
}

Rational weight_of(const DiscreteModel& m, const std::vector<std::size_t>& idx) {
    Rational sum;
    for (std::size_t i : idx) sum += m.weights[i];
    return sum;
}

}  // namespace

std::vector<std::size_t> event_subset(const DiscreteModel& model,
                                      const EventCondition& cond) {
    cond.validate();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < model.tuples.size(); ++i)
        if (matches(model.tuples[i], cond)) out.push_back(i);
    return out;
}

std::vector<std::size_t> triple_subset(const DiscreteModel& model,
                                       const DiscreteSetting& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < model.tuples.size(); ++i)
        if (in_triple(model.tuples[i], s)) out.push_back(i);
    return out;
}

Rational conditional_probability(const DiscreteModel& model, const EventCondition& cond,
                                 const DiscreteSetting& s) {
    cond.validate();
    for (int st = 0; st < 3; ++st)
        if (cond.station[st] && cond.station[st]->angle != s.at(static_cast<Station>(st)))
            throw std::invalid_argument(
                "conditional_probability: condition angle disagrees with setting");
    const Rational denom = weight_of(model, triple_subset(model, s));
    if (denom == Rational(0))
        throw UndefinedConditional("conditional_probability: zero-weight triple subset");
    Rational numer;
    for (std::size_t i = 0; i < model.tuples.size(); ++i)
        if (in_triple(model.tuples[i], s) && matches(model.tuples[i], cond))
            numer += model.weights[i];
    return numer / denom;
}

Rational quantum_conditional(const DiscreteSetting& s, const OutcomeSign& signs) {
    // sin(x+y+z) over multiples of pi/2: n half-pi angles -> sin(n pi/2).
    static constexpr int kSin[4] = {0, 1, 0, -1};
    const int sine = kSin[s.half_pi_count()];
    return Rational(1 + signs.product() * sine, 8);
}

VerificationReport verify_against_quantum(const DiscreteModel& model) {
    VerificationReport report;
    for (const DiscreteSetting& s : DiscreteSetting::all()) {
        for (const OutcomeSign& signs : OutcomeSign::all()) {
            EventCondition cond;
            cond.require(Station::A, s.x, signs.i > 0 ? Requirement::Plus : Requirement::Minus);
            cond.require(Station::B, s.y, signs.j > 0 ? Requirement::Plus : Requirement::Minus);
            cond.require(Station::C, s.z, signs.k > 0 ? Requirement::Plus : Requirement::Minus);
            VerificationCase vc;
            vc.setting = s;
            vc.signs = signs;
            vc.quantum_value = quantum_conditional(s, signs);
            try {
                vc.model_value = conditional_probability(model, cond, s);
                vc.match = vc.model_value == vc.quantum_value;
            } catch (const UndefinedConditional&) {
                // no triple coincidences at this setting: cannot match
                vc.match = false;
            }
            if (vc.match) ++report.matches;
            report.cases.push_back(vc);
        }
    }
    return report;
}

Rational product_expectation(const DiscreteModel& model, const DiscreteSetting& s) {
    const auto idx = s.slot_indices();
    Rational denom, numer;
    for (std::size_t i = 0; i < model.tuples.size(); ++i) {
        const HiddenTuple& t = model.tuples[i];
        if (!in_triple(t, s)) continue;
        denom += model.weights[i];
        const int prod = outcome_value(t.slots[idx[0]]) * outcome_value(t.slots[idx[1]]) *
                         outcome_value(t.slots[idx[2]]);
        numer += model.weights[i] * Rational(prod);
    }
    if (denom == Rational(0))
        throw UndefinedConditional("product_expectation: zero-weight triple subset");
    return numer / denom;
}

Rational triple_efficiency(const DiscreteModel& model, const DiscreteSetting& s) {
    return weight_of(model, triple_subset(model, s));
}

InequalityReport dbs_inequality(double e1, double e2, double e3, double e4) {
    for (double e : {e1, e2, e3, e4})
        if (e < -1.0 || e > 1.0)
            throw std::domain_error("dbs_inequality: expectation outside [-1, 1]");
    InequalityReport r;
    r.statistic = e1 + e2 + e3 - e4;
    r.satisfied = r.statistic >= r.lower && r.statistic <= r.upper;
    return r;
}

}  // namespace ghz
