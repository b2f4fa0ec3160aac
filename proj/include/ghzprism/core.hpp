#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ghz {

// Per-station measurement result. A particle may be predetermined not to
// register at all ("defective"), which is the third value next to +1/-1.
// Enum values are chosen so that the default comparison order is the
// canonical sort order '-' < 'D' < '+'.
enum class Outcome : std::uint8_t { Minus = 0, Defective = 1, Plus = 2 };

// +1 / -1; throws for Defective, which carries no numeric value.
int outcome_value(Outcome o);

char outcome_char(Outcome o);

// Each station has two selectable analyzer angles.
enum class Angle : std::uint8_t { HalfPi = 0, Zero = 1 };

double angle_radians(Angle a);

enum class Station : std::uint8_t { A = 0, B = 1, C = 2 };

// Index into a HiddenTuple: (A(pi/2), A(0), B(pi/2), B(0), C(pi/2), C(0)).
inline int slot_index(Station st, Angle ang) {
    return 2 * static_cast<int>(st) + static_cast<int>(ang);
}

// A 6-slot assignment of predetermined responses, one slot per
// (station, angle) pair, ordered as above.
struct HiddenTuple {
    std::array<Outcome, 6> slots{};

    Outcome at(Station st, Angle ang) const { return slots[slot_index(st, ang)]; }

    friend bool operator==(const HiddenTuple&, const HiddenTuple&) = default;
    // Canonical order: lexicographic with '-' < 'D' < '+'.
    friend auto operator<=>(const HiddenTuple& a, const HiddenTuple& b) {
        return a.slots <=> b.slots;
    }
};

// One of the 8 joint analyzer-angle choices of the two-angle scenario.
struct DiscreteSetting {
    Angle x{Angle::HalfPi};  // station A
    Angle y{Angle::HalfPi};  // station B
    Angle z{Angle::HalfPi};  // station C

    Angle at(Station st) const {
        switch (st) {
            case Station::A: return x;
            case Station::B: return y;
            case Station::C: return z;
        }
        throw std::logic_error("bad station");
    }
    std::array<int, 3> slot_indices() const {
        return {slot_index(Station::A, x), slot_index(Station::B, y),
                slot_index(Station::C, z)};
    }
    int half_pi_count() const {
        return (x == Angle::HalfPi) + (y == Angle::HalfPi) + (z == Angle::HalfPi);
    }

    static const std::array<DiscreteSetting, 8>& all();

    friend bool operator==(const DiscreteSetting&, const DiscreteSetting&) = default;
};

// A joint outcome sign triple (i, j, k).
struct OutcomeSign {
    int i{1};
    int j{1};
    int k{1};

    int product() const { return i * j * k; }

    static const std::array<OutcomeSign, 8>& all();

    friend bool operator==(const OutcomeSign&, const OutcomeSign&) = default;
};

// The four product observables whose perfect correlations generate the
// GHZ contradiction: Omega_1..Omega_3 require product +1, Omega_4 requires -1.
struct ProductObservable {
    int id{1};  // 1..4
    DiscreteSetting setting;
    int required_value{1};

    static const std::array<ProductObservable, 4>& all();
};

struct TupleParseError : std::runtime_error {
    explicit TupleParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses the 6-character text form, e.g. "(+-D-++)" or "+-D-++".
// Accepts ASCII '-' and Unicode minus U+2212; parentheses are optional.
HiddenTuple parse_tuple(std::string_view text);

// Canonical 6-character form using '+', '-', 'D'.
std::string format_tuple(const HiddenTuple& t);

}  // namespace ghz
