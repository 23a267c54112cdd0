#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"

#include "bcclear/error.hpp"

using namespace bcclear;
using fixtures::q;

TEST_CASE("fee grid") {
    const FeeGrid grid(40);
    CHECK(grid.size() == 41);
    CHECK(grid.value(1) == q("0.025"));
    CHECK(grid.value(40) == 1);
    CHECK(grid.contains(0));
    CHECK_FALSE(grid.contains(41));
    const auto levels = grid.levels();
    CHECK(levels.front() == 0);
    CHECK(levels.back() == 1);
    for (std::size_t k = 1; k < levels.size(); ++k) CHECK(levels[k - 1] < levels[k]);
}

TEST_CASE("single fee choice of a payee") {
    const auto net = fixtures::fee_race();
    const auto s = make_schedule(net, fixtures::fee_race_disc(), {{{2, 0}, {{5, 1}}}, {{2, 1}, {{4, 1}}}});
    CHECK(s.at({2, 0}) == AtomMap{{5, 1}});
    CHECK(s.at({0, 1}).empty());
}

TEST_CASE("infeasible schedules are rejected") {
    const auto net = fixtures::fee_race();
    const auto disc = fixtures::fee_race_disc();
    // Under-sum: only the (2,0) obligation is bid.
    CHECK_THROWS_AS(make_schedule(net, disc, {{{2, 0}, {{5, 1}}}}), ValidationError);
    // Padding places the shortfall at fee 0.
    const auto padded = make_schedule(net, disc, {{{2, 0}, {{5, 1}}}}, true);
    CHECK(padded.at({2, 1}) == AtomMap{{0, 1}});
    // Off-grid fee, off-grid amount, over-sum, pair without obligation.
    CHECK_THROWS_AS(make_schedule(net, disc, {{{2, 0}, {{11, 1}}}, {{2, 1}, {{0, 1}}}}), ValidationError);
    CHECK_THROWS_AS(make_schedule(net, disc, {{{2, 0}, {{1, q("0.5")}, {2, q("0.5")}}}, {{2, 1}, {{0, 1}}}}),
                    ValidationError);
    CHECK_THROWS_AS(make_schedule(net, disc, {{{2, 0}, {{1, 2}}}, {{2, 1}, {{0, 1}}}}), ValidationError);
    CHECK_THROWS_AS(make_schedule(net, disc, {{{2, 0}, {{1, 1}}}, {{2, 1}, {{0, 1}}}, {{0, 1}, {{0, 1}}}}),
                    ValidationError);
    try {
        make_schedule(net, disc, {{{2, 0}, {{5, 1}}}});
    } catch (const ValidationError& e) {
        REQUIRE_FALSE(e.details().empty());
        CHECK(e.details()[0].find("(2,1)") != std::string::npos);
    }
}

TEST_CASE("published five-node profile assembles into a feasible schedule") {
    const auto net = fixtures::five_node();
    // Fee-level matrices of the published profile at 0, 1/40 and 2/40.
    const int at0[4][5] = {{3, 0, 0, 0, 0}, {3, 3, 0, 3, 0}, {3, 1, 1, 0, 1}, {3, 1, 2, 1, 0}};
    const int at1[4][5] = {{0, 0, 7, 1, 0}, {0, 0, 0, 0, 3}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
    const int at2[4][5] = {{0, 0, 0, 0, 1}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
    BidMap entries;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            if (at0[i][j]) entries[{std::size_t(i + 1), std::size_t(j)}][0] = at0[i][j];
            if (at1[i][j]) entries[{std::size_t(i + 1), std::size_t(j)}][1] = at1[i][j];
            if (at2[i][j]) entries[{std::size_t(i + 1), std::size_t(j)}][2] = at2[i][j];
        }
    const auto s = make_schedule(net, fixtures::five_node_disc(), entries);
    CHECK(s == fixtures::five_node_published_bids());
    for (const Pair& p : net.obligations()) CHECK(total_mass(s.at(p)) == net.liabilities(p.from, p.to));
}

TEST_CASE("tail masses") {
    const AtomMap single{{4, 1}};
    CHECK(tail_mass(single, 4, Tail::Strict) == 0);
    CHECK(tail_mass(single, 4, Tail::Inclusive) == 1);
    const AtomMap two{{5, 1}, {4, 1}};
    CHECK(tail_mass(two, 4, Tail::Strict) == 1);
    CHECK(tail_mass(AtomMap{}, 0, Tail::Inclusive) == 0);
    CHECK(total_mass(two) == 2);
}

TEST_CASE("discounted tails") {
    CHECK(discounted_tail(AtomMap{{5, 1}}, 4, Tail::Strict, 10) == q("0.5"));
    CHECK(discounted_tail(AtomMap{{0, 3}}, 0, Tail::Inclusive, 40) == 3);
    CHECK(discounted_tail(AtomMap{{1, 7}}, 0, Tail::Inclusive, 40) == q("6.825"));
    CHECK(fee_value(AtomMap{{1, 7}, {2, 1}}, 40) == q("0.225"));
}

TEST_CASE("all-or-nothing schedules") {
    const auto net = fixtures::five_node();
    const auto zero = all_or_nothing(net, fixtures::five_node_disc(), zero_fee_assignment(net));
    for (const Pair& p : net.obligations()) CHECK(zero.at(p) == AtomMap{{0, net.liabilities(p.from, p.to)}});
    CHECK(fixtures::five_node_published_bids().at({1, 4}) == AtomMap{{2, 1}});

    FinancialNetwork empty;
    empty.node_count = 2;
    empty.cash = {0, 0};
    empty.liabilities = Matrix<Rational>(2, 2, Rational(0));
    CHECK(all_or_nothing(empty, {1, 1}, {}).entries().empty());

    auto missing = zero_fee_assignment(net);
    missing.erase({1, 2});
    CHECK_THROWS_AS(all_or_nothing(net, fixtures::five_node_disc(), missing), ValidationError);
    auto off_grid = zero_fee_assignment(net);
    off_grid[{1, 2}] = 41;
    CHECK_THROWS_AS(all_or_nothing(net, fixtures::five_node_disc(), off_grid), ValidationError);
}

TEST_CASE("property: tail algebra on random feasible schedules") {
    gen::Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        gen::NetworkShape shape;
        shape.collateral = true;
        const auto inst = gen::random_network(rng, shape);
        const auto bids = gen::random_bids(rng, inst.network, inst.disc);
        const int fd = inst.disc.fee_denominator;
        for (const Pair& p : inst.network.obligations()) {
            const AtomMap& atoms = bids.at(p);
            CHECK(tail_mass(atoms, 0, Tail::Inclusive) == inst.network.unsecured(p.from, p.to));
            bool all_zero = atoms.size() == 1 && atoms.begin()->first == 0;
            CHECK(discounted_tail(atoms, 0, Tail::Inclusive, fd) <= tail_mass(atoms, 0, Tail::Inclusive));
            CHECK((discounted_tail(atoms, 0, Tail::Inclusive, fd) == tail_mass(atoms, 0, Tail::Inclusive)) ==
                  all_zero);
            for (FeeNum f = 0; f <= fd; ++f) {
                CHECK(discounted_tail(atoms, f, Tail::Strict, fd) <= tail_mass(atoms, f, Tail::Strict));
                if (f > 0) CHECK(tail_mass(atoms, f, Tail::Inclusive) <= tail_mass(atoms, f - 1, Tail::Inclusive));
                if (f < fd) CHECK(tail_mass(atoms, f, Tail::Strict) == tail_mass(atoms, f + 1, Tail::Inclusive));
            }
        }
    }
}
