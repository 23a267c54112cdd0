#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace bcclear {

/// Exact currency and probability amounts.
using Rational = mpq_class;

/// Parses a decimal ("-1.25", "3", "2.5e-3") or fraction ("7/3") string
/// without going through floating point. Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

/// Exact conversion of a binary double.
Rational from_double(double value);

double to_double(const Rational& value);

/// Terminating decimals print as decimals ("5.825"); everything else as "p/q".
std::string to_exact_string(const Rational& value);

std::vector<double> to_doubles(const std::vector<Rational>& values);

/// num/den in lowest terms. mpq_class(num, den) alone does not reduce, and
/// unreduced values compare unequal to their reduced forms.
inline Rational ratio(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational positive_part(const Rational& value) { return value > 0 ? value : Rational(0); }

inline Rational abs_value(const Rational& value) { return value < 0 ? Rational(-value) : value; }

}  // namespace bcclear
