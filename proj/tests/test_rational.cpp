#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bcclear/error.hpp"
#include "bcclear/rational.hpp"

using namespace bcclear;

TEST_CASE("decimal and fraction strings parse exactly") {
    CHECK(parse_rational("5.825") == Rational(233, 40));
    CHECK(parse_rational("-1.25") == Rational(-5, 4));
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("2.5e-3") == Rational(1, 400));
    CHECK(parse_rational("1E2") == 100);
    CHECK(parse_rational("7/3") == Rational(7, 3));
    CHECK(parse_rational("-6/4") == Rational(-3, 2));
    CHECK(parse_rational("+.5") == Rational(1, 2));
}

TEST_CASE("malformed numbers are parse errors") {
    for (const char* bad : {"", "abc", "1.2.3", "1/0", "1/", "--1", "1e", "0x10", "1 2", "nan"})
        CHECK_THROWS_AS(parse_rational(bad), ParseError);
}

TEST_CASE("exact strings print terminating decimals as decimals") {
    CHECK(to_exact_string(Rational(233, 40)) == "5.825");
    CHECK(to_exact_string(Rational(-1)) == "-1");
    CHECK(to_exact_string(Rational(1, 3)) == "1/3");
    CHECK(to_exact_string(Rational(0)) == "0");
    CHECK(to_exact_string(Rational(-1, 8)) == "-0.125");
}

TEST_CASE("round trip through the exact string") {
    for (const Rational& v : {Rational(189, 347), Rational(-23343, 3373), Rational(5, 16), Rational(12345678, 1)})
        CHECK(parse_rational(to_exact_string(v)) == v);
}

TEST_CASE("ratio reduces to lowest terms") {
    CHECK(ratio(0, 40) == 0);
    CHECK(ratio(2, 4) == Rational(1, 2));
    CHECK(ratio(2, 4).get_den() == 2);
}

TEST_CASE("double conversions") {
    CHECK(from_double(0.5) == Rational(1, 2));
    CHECK(from_double(0.1) != Rational(1, 10));
    CHECK(to_double(Rational(1, 4)) == 0.25);
    CHECK(to_double(ratio(13, 10)) == 1.3);
    CHECK(to_double(ratio(-1, 3)) == -1.0 / 3);
    CHECK(positive_part(Rational(-2)) == 0);
    CHECK(abs_value(Rational(-2)) == 2);
}
