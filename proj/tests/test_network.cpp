#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"

#include "bcclear/error.hpp"

using namespace bcclear;
using fixtures::q;

namespace {

FinancialNetwork two_node(Rational x0, Rational x1, Rational l01, Rational l10) {
    FinancialNetwork net;
    net.node_count = 2;
    net.cash = {x0, x1};
    net.liabilities = Matrix<Rational>(2, 2, Rational(0));
    net.liabilities(0, 1) = l01;
    net.liabilities(1, 0) = l10;
    return net;
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
    for (const auto& v : r.violations)
        if (v.rule == rule) return true;
    return false;
}

}  // namespace

TEST_CASE("fee race network is admissible") {
    const auto r = validate(fixtures::fee_race(), fixtures::fee_race_disc());
    CHECK(r.admissible());
    CHECK(r.assumption1_ok);
    CHECK(r.assumption2_ok);
}

TEST_CASE("full collateral with a full fee and no cash breaks the margin assumption") {
    auto net = two_node(0, 0, 2, 0);
    net.collateral_level = 1;
    net.rehypothecation_fee = 1;
    const auto r = validate(net, {1, 1});
    CHECK_FALSE(r.assumption1_ok);
    CHECK(has_rule(r, "assumption1"));
    CHECK_THROWS_AS(initial_cash(net), ValidationError);
    CHECK(initial_cash_unchecked(net)[0] == -2);
}

TEST_CASE("half-unit obligations break integrality") {
    auto net = two_node(1, 1, 1, 0);
    net.collateral_level = q("0.5");
    const auto r = validate(net, {3, 1});
    CHECK_FALSE(r.assumption2_ok);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].indices == std::vector<std::size_t>{0, 1});
    CHECK(validate(net, {2, 1}).assumption2_ok);
}

TEST_CASE("structural rules") {
    auto net = two_node(1, -1, 1, 0);
    net.liabilities(0, 0) = 1;
    net.recovery_rate = 2;
    net.block_capacity = 0;
    const auto r = validate(net, {1, 0});
    CHECK(has_rule(r, "nonnegative-cash"));
    CHECK(has_rule(r, "self-obligation"));
    CHECK(has_rule(r, "parameter-range"));
    CHECK(has_rule(r, "block-capacity"));
    CHECK(has_rule(r, "discretization"));
    CHECK_FALSE(r.admissible());
    CHECK_THROWS_AS(require_admissible(net, {1, 0}), ValidationError);

    auto society = fixtures::five_node();
    society.liabilities(0, 1) = 1;
    CHECK(has_rule(validate(society, fixtures::five_node_disc()), "society-outgoing"));

    FinancialNetwork wrong = fixtures::fee_race();
    wrong.cash.pop_back();
    CHECK(has_rule(validate(wrong, {1, 1}), "dimension"));
}

TEST_CASE("relative liabilities") {
    const auto pi = relative_liabilities(fixtures::five_node());
    for (std::size_t j = 0; j < 5; ++j) CHECK(pi(0, j) == 0);
    const Rational expected[5] = {q("0.25"), q("0.25"), 0, q("0.25"), q("0.25")};
    for (std::size_t j = 0; j < 5; ++j) CHECK(pi(2, j) == expected[j]);
    const auto race = relative_liabilities(fixtures::fee_race());
    CHECK(race(2, 0) == q("0.5"));
    CHECK(race(2, 1) == q("0.5"));
    CHECK(race(2, 2) == 0);
}

TEST_CASE("initial cash") {
    CHECK(initial_cash(fixtures::fee_race()) == fixtures::fee_race().cash);
    auto net = two_node(0, 0, 4, 4);
    net.collateral_level = q("0.25");
    CHECK(initial_cash(net) == std::vector<Rational>{0, 0});
    net.rehypothecation_fee = q("0.5");
    net.cash = {1, 1};
    CHECK(initial_cash(net) == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("obligation listings") {
    const auto net = fixtures::five_node();
    CHECK(net.obligations().size() == 16);
    CHECK(net.incoming_obligations(0).size() == 4);
    CHECK(net.incoming_obligations(2) == std::vector<Pair>{{1, 2}, {3, 2}, {4, 2}});
    CHECK(net.unsecured(1, 2) == 7);
    CHECK(net.total_liabilities(2) == 12);
    CHECK(net.total_claims(0) == 12);
}

TEST_CASE("property: relative liability rows are stochastic and V0 is affine in cash") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        gen::NetworkShape shape;
        shape.collateral = true;
        auto inst = gen::random_network(rng, shape);
        const auto& net = inst.network;
        const auto pi = relative_liabilities(net);
        for (std::size_t i = 0; i < net.node_count; ++i) {
            Rational row = 0;
            for (std::size_t j = 0; j < net.node_count; ++j) {
                CHECK(pi(i, j) >= 0);
                CHECK(pi(i, j) <= 1);
                row += pi(i, j);
            }
            CHECK((row == 1 || (row == 0 && net.total_liabilities(i) == 0)));
        }
        std::vector<Rational> shifted = net.cash;
        for (auto& c : shifted) c += ratio(3, 7);
        const auto base = initial_cash_unchecked(net);
        const auto moved = initial_cash_unchecked(net.with_cash(shifted));
        for (std::size_t i = 0; i < net.node_count; ++i) CHECK(moved[i] - base[i] == ratio(3, 7));

        auto plain = net;
        plain.collateral_level = 0;
        CHECK(initial_cash_unchecked(plain) == plain.cash);

        const auto first = validate(net, inst.disc);
        const auto second = validate(net, inst.disc);
        CHECK(first.messages() == second.messages());
    }
}
