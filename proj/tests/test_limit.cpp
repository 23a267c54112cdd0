#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include "bcclear/error.hpp"

using namespace bcclear;
using fixtures::q;

namespace {

double sup_gap(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    double g = 0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(to_double(a[i] - b[i])));
    return g;
}

}  // namespace

TEST_CASE("terminal threshold fee") {
    const auto net = fixtures::fee_race();
    const auto bids = fixtures::fee_race_bids(5, 4);
    CHECK(threshold_fee_terminal(q("-0.5"), net, bids, 2) == 4);
    CHECK(threshold_fee_terminal(0, net, bids, 2) == 0);
    CHECK(threshold_fee_terminal(3, net, bids, 2) == 0);
    CHECK(threshold_fee_terminal(-2, net, bids, 2) == 5);
}

TEST_CASE("a bank with nothing beyond its obligations sits at the top fee") {
    FinancialNetwork net;
    net.node_count = 2;
    net.cash = {0, 0};
    net.liabilities = Matrix<Rational>(2, 2, Rational(0));
    net.liabilities(0, 1) = 1;
    const auto bids = all_or_nothing(net, {1, 4}, {{{0, 1}, 4}});
    CHECK(threshold_fee_terminal(-1, net, bids, 0) == 4);
    CHECK(oracle::threshold_scan(net, bids, 0, -1) == 4);
}

TEST_CASE("terminal map for the fee race") {
    const auto net = fixtures::fee_race();
    const auto bids = fixtures::fee_race_bids(5, 4);
    const std::vector<Rational> want{q("1.5"), q("1.3"), q("-0.5")};
    CHECK(terminal_map({1, 1, q("-0.5")}, net, bids) == want);
    CHECK(terminal_map({0, 7, q("-0.5")}, net, bids) == want);
    const auto t = solve_terminal(net, bids, Bound::Greatest);
    CHECK(t.exact);
    CHECK(t.net_worths == want);
    CHECK(t.thresholds == std::vector<FeeNum>{0, 0, 4});
    CHECK(t.cash() == std::vector<Rational>{q("1.5"), q("1.3"), 0});
}

TEST_CASE("solvent counterparties pay discounted full bids") {
    const auto net = gen::make_default_free(fixtures::five_node(true));
    const auto bids = fixtures::five_node_published_bids();
    const auto t = solve_terminal(net, bids, Bound::Greatest);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(t.solvent[i]);
        Rational want = net.cash[i] - net.total_liabilities(i);
        for (std::size_t j = 0; j < 5; ++j) want += discounted_tail(bids.at({j, i}), 0, Tail::Inclusive, 40);
        CHECK(t.net_worths[i] == want);
    }
}

TEST_CASE("zero fees on a default-free network pay everyone in full") {
    const auto net = gen::make_default_free(fixtures::five_node(true));
    const auto bids = all_or_nothing(net, fixtures::five_node_disc(), zero_fee_assignment(net));
    const auto t = solve_terminal(net, bids, Bound::Least);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(t.net_worths[i] == net.cash[i] + net.total_claims(i) - net.total_liabilities(i));
        CHECK(t.net_worths[i] >= 0);
    }
    const auto trace = run_chain(net, bids);
    CHECK(consistency_check(trace, t, 0).ok);
}

TEST_CASE("five-node network under the published bids") {
    const auto bids = fixtures::five_node_published_bids();
    const auto u = solve_terminal(fixtures::five_node(false), bids, Bound::Greatest);
    CHECK(u.exact);
    CHECK(u.net_worths == std::vector<Rational>{11, -1, q("5.825"), q("5.975"), q("7.875")});

    const auto s = solve_terminal(fixtures::five_node(true), bids, Bound::Greatest);
    CHECK(s.exact);
    const double want[5] = {7.9585, -6.9205, -2.5802, -0.3629, 2.8145};
    for (int i = 0; i < 5; ++i) CHECK(std::abs(to_double(s.net_worths[i]) - want[i]) < 1e-4);
    CHECK(s.net_worths[0] == Rational(26844, 3373));

    CHECK(uniqueness_check(fixtures::five_node(false)));
    const auto sl = solve_terminal(fixtures::five_node(true), bids, Bound::Least);
    CHECK(sl.net_worths == s.net_worths);
}

TEST_CASE("uniqueness condition follows the sign of endowments") {
    FinancialNetwork net = fixtures::fee_race();
    CHECK(uniqueness_check(net));
    net.cash[1] = -1;
    CHECK_FALSE(uniqueness_check(net));
    net.collateral_level = 1;
    CHECK(uniqueness_check(net));  // the collateral on (2,1) covers it
}

TEST_CASE("non-convergence is reported with the last iterate") {
    TerminalOptions opts;
    opts.max_iter = 1;
    opts.tol = 0;
    try {
        solve_terminal(fixtures::five_node(true), fixtures::five_node_published_bids(), Bound::Greatest, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() == 1);
        CHECK(e.last_iterate().size() == 5);
    }
}

TEST_CASE("terminal solutions agree with pattern enumeration") {
    gen::Rng rng(77);
    gen::NetworkShape shape;
    shape.max_nodes = 3;
    shape.max_fee_denominator = 3;
    shape.collateral = true;
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = gen::random_network(rng, shape);
        const auto bids = gen::random_bids(rng, inst.network, inst.disc);
        CAPTURE(trial);
        const auto oracle = oracle::terminal_by_enumeration(inst.network, bids);
        REQUIRE(oracle.count > 0);
        const auto g = solve_terminal(inst.network, bids, Bound::Greatest);
        const auto l = solve_terminal(inst.network, bids, Bound::Least);
        CHECK(sup_gap(g.net_worths, oracle.greatest) < 1e-8);
        CHECK(sup_gap(l.net_worths, oracle.least) < 1e-8);
        CHECK(oracle::terminal_rhs(inst.network, bids, g.net_worths) == g.net_worths);
        for (std::size_t i = 0; i < inst.network.node_count; ++i) {
            CHECK(g.net_worths[i] >= l.net_worths[i]);
            if (g.solvent[i]) CHECK(g.thresholds[i] == 0);
        }
        if (uniqueness_check(inst.network)) CHECK(sup_gap(g.net_worths, l.net_worths) < 1e-8);
    }
}

TEST_CASE("terminal map is monotone and thresholds fall as net worth rises") {
    gen::Rng rng(91);
    gen::NetworkShape shape;
    shape.collateral = true;
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = gen::random_network(rng, shape);
        const auto bids = gen::random_bids(rng, inst.network, inst.disc);
        const std::size_t n = inst.network.node_count;
        const auto hi = terminal_upper_start(inst.network, bids);
        const auto lo = terminal_lower_start(inst.network);
        std::vector<Rational> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Rational t = ratio(rng.integer(0, 8), 8);
            const Rational s = t + ratio(rng.integer(0, 8), 8) * (1 - t);
            a[i] = lo[i] + t * (hi[i] - lo[i]);
            b[i] = lo[i] + s * (hi[i] - lo[i]);
        }
        const auto ma = terminal_map(a, inst.network, bids);
        const auto mb = terminal_map(b, inst.network, bids);
        CHECK(ma == oracle::terminal_rhs(inst.network, bids, a));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ma[i] <= mb[i]);
            CHECK(threshold_fee_terminal(b[i], inst.network, bids, i) <= threshold_fee_terminal(a[i], inst.network, bids, i));
        }
    }
}

TEST_CASE("accounting identity holds at the fixed point") {
    CHECK(equity_accounting_gap(fixtures::five_node(true), fixtures::five_node_published_bids(),
                                solve_terminal(fixtures::five_node(true), fixtures::five_node_published_bids(),
                                               Bound::Greatest)) == 0);
    gen::Rng rng(3);
    gen::NetworkShape shape;
    shape.collateral = true;
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = gen::random_network(rng, shape);
        const auto bids = gen::random_bids(rng, inst.network, inst.disc);
        const auto t = solve_terminal(inst.network, bids, Bound::Greatest);
        CAPTURE(trial);
        REQUIRE(t.exact);
        CHECK(equity_accounting_gap(inst.network, bids, t) == 0);
    }
}

TEST_CASE("large-capacity chains end at the terminal cash") {
    gen::Rng rng(4);
    gen::NetworkShape shape;
    shape.max_fee_denominator = 4;
    shape.max_bid_denominator = 4;
    for (int trial = 0; trial < 150; ++trial) {
        const auto inst = gen::random_network(rng, shape);
        const auto bids = gen::random_bids(rng, inst.network, inst.disc);
        const auto trace = run_chain(inst.network, bids);
        const auto t = solve_terminal(inst.network, bids, Bound::Greatest);
        CAPTURE(trial);
        const auto report = consistency_check(trace, t, 1e-6);
        CHECK(report.ok);
    }
}
