#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace pcsp {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

/// Least common multiple of the denominators; scaling by it clears fractions.
inline Int common_denominator(const std::vector<Rat>& xs) {
    Int l = 1;
    for (const auto& q : xs) {
        Int d = rat_den(q);
        l = boost::multiprecision::lcm(l, d);
    }
    return l;
}

} // namespace pcsp
