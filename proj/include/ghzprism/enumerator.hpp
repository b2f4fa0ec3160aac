#pragma once

#include <map>
#include <vector>

#include "ghzprism/core.hpp"

namespace ghz {

// Breakdown of the constraint-respecting tuples by the number of
// analyzer-angle choices at which they yield a triple coincidence.
struct Partition {
    int total{0};    // 3^6 = 729
    int allowed{0};  // tuples passing all four product constraints
    std::map<int, int> by_coincidence_count;
};

// All 729 tuples of {+,-,D}^6 in canonical order ('-' < 'D' < '+').
std::vector<HiddenTuple> enumerate_all();

// True iff for each of the four product observables either some relevant
// slot is Defective (no triple coincidence, constraint vacuous) or the
// product of the three slot values equals the required value.
bool satisfies_ghz_constraints(const HiddenTuple& t);

// Number of the 8 settings at which all three relevant slots are non-Defective.
int coincidence_setup_count(const HiddenTuple& t);

Partition classify_allowed();

// The 48 allowed tuples with coincidence count 4, canonically sorted.
std::vector<HiddenTuple> build_lambda48();

}  // namespace ghz
