#include "ghzprism/core.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace ghz {

int outcome_value(Outcome o) {
    switch (o) {
        case Outcome::Plus: return 1;
        case Outcome::Minus: return -1;
        case Outcome::Defective:
            throw std::logic_error("outcome_value: Defective has no numeric value");
    }
    throw std::logic_error("bad outcome");
}

char outcome_char(Outcome o) {
    switch (o) {
        case Outcome::Plus: return '+';
        case Outcome::Minus: return '-';
        case Outcome::Defective: return 'D';
    }
    throw std::logic_error("bad outcome");
}

double angle_radians(Angle a) {
    return a == Angle::HalfPi ? std::numbers::pi / 2.0 : 0.0;
}

const std::array<DiscreteSetting, 8>& DiscreteSetting::all() {
    static const std::array<DiscreteSetting, 8> v = [] {
        std::array<DiscreteSetting, 8> s{};
        int n = 0;
        for (Angle x : {Angle::HalfPi, Angle::Zero})
            for (Angle y : {Angle::HalfPi, Angle::Zero})
                for (Angle z : {Angle::HalfPi, Angle::Zero}) s[n++] = {x, y, z};
        return s;
    }();
    return v;
}

const std::array<OutcomeSign, 8>& OutcomeSign::all() {
    static const std::array<OutcomeSign, 8> v = [] {
        std::array<OutcomeSign, 8> s{};
        int n = 0;
        for (int i : {1, -1})
            for (int j : {1, -1})
                for (int k : {1, -1}) s[n++] = {i, j, k};
        return s;
    }();
    return v;
}

const std::array<ProductObservable, 4>& ProductObservable::all() {
    static const std::array<ProductObservable, 4> v = {{
        {1, {Angle::HalfPi, Angle::Zero, Angle::Zero}, 1},
        {2, {Angle::Zero, Angle::HalfPi, Angle::Zero}, 1},
        {3, {Angle::Zero, Angle::Zero, Angle::HalfPi}, 1},
        {4, {Angle::HalfPi, Angle::HalfPi, Angle::HalfPi}, -1},
    }};
    return v;
}

HiddenTuple parse_tuple(std::string_view text) {
    std::string_view s = text;
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
        s = s.substr(1, s.size() - 2);

    std::vector<Outcome> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t sym = out.size() + 1;
        const char c = s[pos];
        if (c == '+') {
            out.push_back(Outcome::Plus);
            ++pos;
        } else if (c == '-') {
            out.push_back(Outcome::Minus);
            ++pos;
        } else if (c == 'D') {
            out.push_back(Outcome::Defective);
            ++pos;
        } else if (pos + 2 < s.size() && static_cast<unsigned char>(s[pos]) == 0xE2 &&
                   static_cast<unsigned char>(s[pos + 1]) == 0x88 &&
                   static_cast<unsigned char>(s[pos + 2]) == 0x92) {
            // Unicode minus U+2212
            out.push_back(Outcome::Minus);
            pos += 3;
        } else {
            throw TupleParseError("parse_tuple: illegal character at symbol position " +
                                  std::to_string(sym) + " in \"" + std::string(text) + "\"");
        }
        if (out.size() > 6)
            throw TupleParseError("parse_tuple: expected 6 symbols, got more in \"" +
                                  std::string(text) + "\"");
    }
    if (out.size() != 6)
        throw TupleParseError("parse_tuple: expected 6 symbols, got " +
                              std::to_string(out.size()) + " in \"" + std::string(text) +
                              "\"");
    HiddenTuple t;
    for (int i = 0; i < 6; ++i) t.slots[i] = out[i];
    return t;
}

std::string format_tuple(const HiddenTuple& t) {
    std::string s(6, ' ');
    for (int i = 0; i < 6; ++i) s[i] = outcome_char(t.slots[i]);
    return s;
}

}  // namespace ghz
