#include "bcclear/rational.hpp"

#include "bcclear/error.hpp"

#include <cctype>
#include <charconv>

namespace bcclear {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

mpz_class pow10(unsigned long exponent) {
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
    return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string original(text);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty number '" + original + "'");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + original + "'");
        Rational q = num / den;
        q.canonicalize();
        return q;
    }

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6) throw ParseError("bad exponent in '" + original + "'");
        long value = 0;
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), value);
        exponent = exp_negative ? -value : value;
        text = text.substr(0, e);
    }

    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        int_part = text.substr(0, dot);
        frac_part = text.substr(dot + 1);
    }
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)))
        throw ParseError("malformed number '" + original + "'");

    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class numerator(digits.empty() ? std::string("0") : digits, 10);
    exponent -= static_cast<long>(frac_part.size());

    Rational result;
    if (exponent >= 0) {
        result = Rational(numerator * pow10(static_cast<unsigned long>(exponent)));
    } else {
        result = Rational(numerator, pow10(static_cast<unsigned long>(-exponent)));
    }
    result.canonicalize();
    return negative ? Rational(-result) : result;
}

Rational from_double(double value) {
    Rational r(value);
    r.canonicalize();
    return r;
}

double to_double(const Rational& value) {
    // get_d truncates; one IEEE division of exactly representable parts rounds to nearest.
    const auto exact = [](const mpz_class& z) { return mpz_sizeinbase(z.get_mpz_t(), 2) <= 53; };
    if (exact(value.get_num()) && exact(value.get_den())) return value.get_num().get_d() / value.get_den().get_d();
    return value.get_d();
}

std::string to_exact_string(const Rational& value) {
    mpz_class den = value.get_den();
    unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
    unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
    if (den != 1) return value.get_str();

    const unsigned long places = std::max(twos, fives);
    mpz_class scaled = value.get_num() * pow10(places) / value.get_den();
    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.get_str();
    if (places > 0) {
        if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
        digits.insert(digits.size() - places, ".");
    }
    return negative ? "-" + digits : digits;
}

std::vector<double> to_doubles(const std::vector<Rational>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(to_double(v));
    return out;
}

}  // namespace bcclear
