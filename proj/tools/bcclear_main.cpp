// Command-line front end: parses flags into a RunConfig and prints the report.
#include "bcclear/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace bcclear;
    CLI::App app{"Blockchain clearing of interbank obligations"};
    app.require_subcommand(1);

    RunConfig config;
    std::string evaluator = "limit", mode = "pure-scan", space = "all-or-nothing", bound = "greatest";
    std::optional<std::size_t> scenario;

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"validate", "Check structure and the model assumptions"},
        {"clear-centralized", "Centralized clearing benchmark per scenario"},
        {"simulate-chain", "Build blocks until payments stop"},
        {"solve-limit", "Terminal net worths with unbounded block capacity"},
        {"solve-nash", "Equilibrium bidding among selected nodes"},
        {"solve-pareto", "Scalarized Pareto search over all-or-nothing fees"},
    };
    for (const auto& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("network,--network", config.network_path, "Network JSON (or a report to replay)")->required();
        sub->add_option("--bids", config.bids_path, "Bids JSON");
        sub->add_option("--scenarios", config.scenarios_path, "Scenarios/objective JSON");
        sub->add_option("--out", config.out_path, "Write the report here instead of stdout");
        sub->add_option("--tol", config.tol, "Fixed-point tolerance")->capture_default_str();
        sub->add_option("--max-iter", config.max_iter, "Fixed-point iteration cap")->capture_default_str();
        sub->add_option("--volume-epsilon", config.volume_epsilon, "Stop when block volume drops below")
            ->capture_default_str();
        sub->add_option("--max-blocks", config.max_blocks, "Block cap per chain")->capture_default_str();
        sub->add_option("--enum-budget", config.enumeration_budget, "Enumeration budget")->capture_default_str();
        sub->add_option("--seed", config.seed, "Seed for every random choice")->capture_default_str();
        sub->add_option("--evaluator", evaluator, "Terminal cash evaluator")
            ->check(CLI::IsMember({"chain", "limit", "centralized"}))
            ->capture_default_str();
        sub->add_flag("--pad-zero-fee", config.pad_zero_fee, "Put unbid remainders at fee 0");
        sub->add_flag("--greedy-fallback", config.greedy_fallback, "Greedy blocks past the enumeration budget");
        sub->add_flag("--random-ties", config.random_ties, "Seeded choice among fee-maximizing blocks");
        sub->add_option("--bound", bound, "Greatest or least solution")
            ->check(CLI::IsMember({"greatest", "least"}))
            ->capture_default_str();
        if (std::string(spec.name) == "simulate-chain")
            sub->add_option("--scenario", scenario, "Use this scenario's endowment");
        if (std::string(spec.name) == "solve-nash") {
            sub->add_option("--mode", mode, "Solver")
                ->check(CLI::IsMember({"pure-scan", "symmetric-mixed", "support-enumeration", "fictitious-play"}))
                ->capture_default_str();
            sub->add_option("--players", config.players, "Player nodes (default: every node with claims)");
            sub->add_option("--space", space, "Strategy space")
                ->check(CLI::IsMember({"all-or-nothing", "full-grid"}))
                ->capture_default_str();
            sub->add_option("--rounds", config.rounds, "Fictitious play rounds")->capture_default_str();
            sub->add_option("--eq-tol", config.equilibrium_tol, "Payoff tolerance")->capture_default_str();
        }
        if (std::string(spec.name) == "solve-pareto") {
            sub->add_option("--starts", config.starts, "Number of starts (first is all-zero fees)")
                ->capture_default_str();
            sub->add_option("--max-sweeps", config.max_sweeps, "Sweeps per start")->capture_default_str();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    config.subcommand = app.get_subcommands().front()->get_name();
    config.scenario = scenario;
    try {
        config.evaluator = parse_evaluator(evaluator);
        config.nash_mode = parse_nash_mode(mode);
        config.space = parse_space(space);
        config.bound = parse_bound(bound);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitParse;
    }

    const RunOutcome outcome = run(config);
    if (config.out_path.empty() || outcome.exit_code != kExitOk)
        (outcome.exit_code == kExitOk ? std::cout : std::cerr) << outcome.report.dump(2) << "\n";
    return outcome.exit_code;
}
