#include "ghzprism/enumerator.hpp"

namespace ghz {

std::vector<HiddenTuple> enumerate_all() {
    // Counting in base 3 with digit order Minus < Defective < Plus and the
    // first slot most significant yields canonical order directly.
    static constexpr Outcome kOrder[3] = {Outcome::Minus, Outcome::Defective,
                                          Outcome::Plus};
    std::vector<HiddenTuple> out;
    out.reserve(729);
    for (int n = 0; n < 729; ++n) {
        HiddenTuple t;
        int rem = n;
        for (int slot = 5; slot >= 0; --slot) {
            t.slots[slot] = kOrder[rem % 3];
            rem /= 3;
        }
        out.push_back(t);
    }
    return out;
}

bool satisfies_ghz_constraints(const HiddenTuple& t) {
    for (const ProductObservable& obs : ProductObservable::all()) {
        const auto idx = obs.setting.slot_indices();
        bool defective = false;
        int product = 1;
        for (int i : idx) {
            if (t.slots[i] == Outcome::Defective) {
                defective = true;
                break;
            }
            product *= outcome_value(t.slots[i]);
        }
        if (!defective && product != obs.required_value) return false;
    }
    return true;
}

int coincidence_setup_count(const HiddenTuple& t) {
    int count = 0;
    for (const DiscreteSetting& s : DiscreteSetting::all()) {
        const auto idx = s.slot_indices();
        if (t.slots[idx[0]] != Outcome::Defective &&
            t.slots[idx[1]] != Outcome::Defective &&
            t.slots[idx[2]] != Outcome::Defective)
            ++count;
    }
    return count;
}

Partition classify_allowed() {
    Partition p;
    for (const HiddenTuple& t : enumerate_all()) {
        ++p.total;
        if (!satisfies_ghz_constraints(t)) continue;
        ++p.allowed;
        ++p.by_coincidence_count[coincidence_setup_count(t)];
    }
    return p;
}

std::vector<HiddenTuple> build_lambda48() {
    std::vector<HiddenTuple> out;
    for (const HiddenTuple& t : enumerate_all())
        if (satisfies_ghz_constraints(t) && coincidence_setup_count(t) == 4)
            out.push_back(t);
    return out;  // enumerate_all is canonical, so this is already sorted
}

}  // namespace ghz
