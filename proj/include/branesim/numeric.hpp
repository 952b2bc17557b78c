// ============================================================================
// numeric.hpp — arbitrary-precision counts and exact rational rates
// ============================================================================
//
// Population counts are arbitrary-precision integers so that canonical forms
// and species multisets never overflow, and the reference oracle computes
// rates in exact rational arithmetic (the simulator proper uses doubles
// derived from these).
//
// ============================================================================

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace brane {

using Count = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const Count& c) { return c.convert_to<double>(); }

// binomial(n, k) for the small k used by reaction stoichiometry (k <= 2 in
// practice, but the loop is generic). Returns 0 when n < k.
inline Count binomial(const Count& n, unsigned k) {
    if (n < k) return 0;
    Count num = 1;
    Count den = 1;
    for (unsigned i = 0; i < k; ++i) {
        num *= n - i;
        den *= i + 1;
    }
    return num / den;
}

// Parses a nonnegative decimal literal ("10", "0.25", "2.5e-3") into an
// exact rational. Returns false on malformed input.
bool parse_decimal_rational(const std::string& text, Rational& out);

// Renders a rational as "p" or "p/q" (exact, deterministic).
std::string to_string(const Rational& r);

}  // namespace brane
