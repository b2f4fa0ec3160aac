#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ghzprism/core.hpp"
#include "ghzprism/rational.hpp"

namespace ghz {

// A weighted finite hidden-variable set. Weights are exact rationals that
// must be nonnegative and sum to 1.
struct DiscreteModel {
    std::vector<HiddenTuple> tuples;
    std::vector<Rational> weights;

    // Uniform distribution over the 48-element set.
    static DiscreteModel uniform48();
    // Uniform distribution over an arbitrary tuple set.
    static DiscreteModel uniform(std::vector<HiddenTuple> tuples);

    void validate() const;  // throws std::invalid_argument on bad weights
};

enum class Requirement : std::uint8_t { Plus, Minus, NonDefective };

// Conjunction of per-station requirements such as {A(pi/2)=+ & B(0)=-}.
// At most one requirement per station, at least one overall.
struct EventCondition {
    struct Term {
        Angle angle;
        Requirement req;
    };
    std::array<std::optional<Term>, 3> station{};  // indexed by Station

    EventCondition& require(Station st, Angle ang, Requirement r);
    void validate() const;
};

struct UndefinedConditional : std::runtime_error {
    explicit UndefinedConditional(const std::string& msg) : std::runtime_error(msg) {}
};

// Indices into model.tuples of the tuples meeting every requirement.
// Defective never matches a Plus/Minus requirement.
std::vector<std::size_t> event_subset(const DiscreteModel& model,
                                      const EventCondition& cond);

// Tuples non-Defective at all three slots of the setting.
std::vector<std::size_t> triple_subset(const DiscreteModel& model,
                                       const DiscreteSetting& s);

// p(event | triple coincidence at s), exact.
Rational conditional_probability(const DiscreteModel& model, const EventCondition& cond,
                                 const DiscreteSetting& s);

// The quantum reference value (1 + ijk sin(x+y+z)) / 8; sin is exactly
// 0, 1 or -1 at the discrete settings.
Rational quantum_conditional(const DiscreteSetting& s, const OutcomeSign& signs);

struct VerificationCase {
    DiscreteSetting setting;
    OutcomeSign signs;
    Rational model_value;
    Rational quantum_value;
    bool match{false};
};

struct VerificationReport {
    std::vector<VerificationCase> cases;  // 8 settings x 8 sign triples
    int matches{0};
    bool all_match() const { return matches == static_cast<int>(cases.size()); }
};

// Compares all 64 conditional probabilities against the quantum reference,
// with exact rational equality.
VerificationReport verify_against_quantum(const DiscreteModel& model);

// E(A(x)B(y)C(z)) on the triple-coincidence sub-ensemble, exact.
Rational product_expectation(const DiscreteModel& model, const DiscreteSetting& s);

// Total weight of the triple subset.
Rational triple_efficiency(const DiscreteModel& model, const DiscreteSetting& s);

struct InequalityReport {
    double statistic{0.0};  // E1 + E2 + E3 - E4
    double lower{-2.0};
    double upper{2.0};
    bool satisfied{false};
    double epsilon_needed{0.5};
};

// The first two-valued-LHV inequality: -2 <= E1+E2+E3-E4 <= 2.
// Inputs must lie in [-1, 1].
InequalityReport dbs_inequality(double e1, double e2, double e3, double e4);

}  // namespace ghz
