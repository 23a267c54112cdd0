#include "bcclear/cli.hpp"

#include "bcclear/error.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace bcclear {

const char* to_string(NashMode mode) {
    switch (mode) {
        case NashMode::PureScan: return "pure-scan";
        case NashMode::SymmetricMixed: return "symmetric-mixed";
        case NashMode::SupportEnumeration: return "support-enumeration";
        case NashMode::FictitiousPlay: return "fictitious-play";
    }
    return "?";
}

NashMode parse_nash_mode(const std::string& text) {
    for (NashMode m : {NashMode::PureScan, NashMode::SymmetricMixed, NashMode::SupportEnumeration,
                       NashMode::FictitiousPlay})
        if (text == to_string(m)) return m;
    throw ParseError("unknown nash mode \"" + text + "\"", "--mode");
}

Evaluator parse_evaluator(const std::string& text) {
    if (text == "chain") return Evaluator::Chain;
    if (text == "limit") return Evaluator::Limit;
    if (text == "centralized") return Evaluator::Centralized;
    throw ParseError("unknown evaluator \"" + text + "\"", "--evaluator");
}

SpaceMode parse_space(const std::string& text) {
    if (text == "all-or-nothing") return SpaceMode::AllOrNothing;
    if (text == "full-grid") return SpaceMode::FullGrid;
    throw ParseError("unknown strategy space \"" + text + "\"", "--space");
}

Bound parse_bound(const std::string& text) {
    if (text == "greatest") return Bound::Greatest;
    if (text == "least") return Bound::Least;
    throw ParseError("unknown bound \"" + text + "\"", "--bound");
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file", path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json document_record(const std::string& path, const std::string& digest, const json& document) {
    return {{"path", path}, {"sha256", digest}, {"document", document}};
}

// Location prefix for errors raised while interpreting a document.
template <class F>
auto with_source(const std::string& source, F&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(e.what(), source);
    }
}

}  // namespace

LoadedInputs load_inputs(const InputPaths& paths, bool check) {
    if (paths.network.empty()) throw ParseError("a network file is required", "--network");
    LoadedInputs out;

    const std::string network_text = read_file(paths.network);
    json network_doc = parse_json_text(network_text, paths.network);
    json replay;
    if (network_doc.is_object() && network_doc.value("schema", "") == kReportSchema) {
        replay = network_doc.at("inputs");
        out.record["network"] = replay.at("network");
        network_doc = replay.at("network").at("document");
    } else {
        out.record["network"] = document_record(paths.network, sha256_hex(network_text), network_doc);
    }
    out.problem = with_source(paths.network, [&] { return parse_network(network_doc); });
    const FinancialNetwork& net = out.problem.network;

    if (check) require_admissible(net, out.problem.discretization);

    std::optional<ScenarioSet> scenarios = out.problem.scenarios;
    std::optional<ObjectiveSpec> objective = out.problem.objective;
    json scenario_doc;
    if (!paths.scenarios.empty()) {
        const std::string text = read_file(paths.scenarios);
        scenario_doc = parse_json_text(text, paths.scenarios);
        out.record["scenarios"] = document_record(paths.scenarios, sha256_hex(text), scenario_doc);
    } else if (replay.contains("scenarios")) {
        out.record["scenarios"] = replay["scenarios"];
        scenario_doc = replay["scenarios"]["document"];
    }
    if (!scenario_doc.is_null()) {
        with_source(paths.scenarios, [&] {
            if (auto s = parse_scenarios(scenario_doc)) scenarios = std::move(s);
            if (auto o = parse_objective(scenario_doc, net.node_count)) objective = std::move(o);
            return 0;
        });
    }
    out.scenarios = scenarios ? *scenarios : ScenarioSet::single(net.cash);
    out.scenarios.check_dimension(net.node_count);
    out.objective = objective ? *objective : ObjectiveSpec::uniform(net.node_count);

    json bids_doc;
    if (!paths.bids.empty()) {
        const std::string text = read_file(paths.bids);
        bids_doc = parse_json_text(text, paths.bids);
        out.record["bids"] = document_record(paths.bids, sha256_hex(text), bids_doc);
    } else if (replay.contains("bids")) {
        out.record["bids"] = replay["bids"];
        bids_doc = replay["bids"]["document"];
    }
    if (!bids_doc.is_null()) out.bids = with_source(paths.bids, [&] { return parse_bids(bids_doc, net); });
    return out;
}

json config_to_json(const RunConfig& c) {
    json players = json::array();
    for (auto p : c.players) players.push_back(p);
    return {{"subcommand", c.subcommand},
            {"network", c.network_path},
            {"bids", c.bids_path},
            {"scenarios", c.scenarios_path},
            {"tol", c.tol},
            {"max_iter", c.max_iter},
            {"volume_epsilon", c.volume_epsilon},
            {"max_blocks", c.max_blocks},
            {"enum_budget", c.enumeration_budget},
            {"seed", c.seed},
            {"evaluator", to_string(c.evaluator)},
            {"pad_zero_fee", c.pad_zero_fee},
            {"greedy_fallback", c.greedy_fallback},
            {"random_ties", c.random_ties},
            {"bound", to_string(c.bound)},
            {"scenario", c.scenario ? json(*c.scenario) : json(nullptr)},
            {"mode", to_string(c.nash_mode)},
            {"players", players},
            {"space", to_string(c.space)},
            {"rounds", c.rounds},
            {"equilibrium_tol", c.equilibrium_tol},
            {"starts", c.starts},
            {"max_sweeps", c.max_sweeps}};
}

namespace {

EvaluationOptions evaluation_options(const RunConfig& c) {
    EvaluationOptions o;
    o.evaluator = c.evaluator;
    o.chain.volume_epsilon = parse_rational(c.volume_epsilon);
    o.chain.max_blocks = c.max_blocks;
    o.chain.enumeration_budget = c.enumeration_budget;
    o.chain.greedy_fallback = c.greedy_fallback;
    if (c.random_ties) o.chain.random_tie_seed = c.seed;
    o.limit.tol = c.tol;
    o.limit.max_iter = c.max_iter;
    o.centralized.tol = c.tol;
    o.centralized.max_iter = c.max_iter;
    return o;
}

void check_config(const RunConfig& c) {
    std::vector<std::string> problems;
    if (!(c.tol > 0)) problems.push_back("--tol must be positive");
    if (c.max_iter == 0) problems.push_back("--max-iter must be positive");
    if (c.max_blocks == 0) problems.push_back("--max-blocks must be positive");
    if (!(c.enumeration_budget >= 1)) problems.push_back("--enum-budget must be at least 1");
    if (parse_rational(c.volume_epsilon) < 0) problems.push_back("--volume-epsilon must be nonnegative");
    if (parse_rational(c.equilibrium_tol) < 0) problems.push_back("--eq-tol must be nonnegative");
    if (c.rounds == 0) problems.push_back("--rounds must be positive");
    if (!problems.empty()) throw ParseError("invalid configuration: " + problems.front(), "config");
}

BidSchedule schedule_or_zero(const LoadedInputs& in, const RunConfig& c, json& result) {
    const auto& net = in.problem.network;
    if (in.bids) {
        result["bids_source"] = "file";
        return make_schedule(net, in.problem.discretization, *in.bids, c.pad_zero_fee);
    }
    result["bids_source"] = "zero-fee default";
    return all_or_nothing(net, in.problem.discretization, zero_fee_assignment(net));
}

json booleans(const std::vector<bool>& v) {
    json out = json::array();
    for (bool b : v) out.push_back(b);
    return out;
}

json pairs_json(const std::vector<Pair>& pairs) {
    json out = json::array();
    for (const auto& p : pairs) out.push_back({p.from, p.to});
    return out;
}

json weighted(const std::vector<Rational>& cash, const ObjectiveSpec& objective) {
    return rational_to_json(weighted_objective(cash, objective));
}

json validate_command(const LoadedInputs& in) {
    const auto report = validate(in.problem.network, in.problem.discretization);
    json violations = json::array();
    for (const auto& v : report.violations) {
        json idx = json::array();
        for (auto k : v.indices) idx.push_back(k);
        violations.push_back({{"rule", v.rule}, {"indices", idx}, {"message", v.message}});
    }
    json result = {{"admissible", report.admissible()},
                   {"assumption1", report.assumption1_ok},
                   {"assumption2", report.assumption2_ok},
                   {"violations", violations},
                   {"uniqueness_condition", uniqueness_check(in.problem.network)},
                   {"obligations", in.problem.network.obligations().size()}};
    if (report.admissible()) result["initial_cash"] = rationals_to_json(initial_cash(in.problem.network));
    if (!report.admissible()) throw ValidationError("network is not admissible", report.messages());
    return result;
}

json centralized_command(const LoadedInputs& in, const RunConfig& c) {
    const auto& net = in.problem.network;
    const auto options = evaluation_options(c);
    json scenarios = json::array();
    std::vector<Rational> expected(net.node_count, Rational(0));
    bool exact = true;
    for (std::size_t k = 0; k < in.scenarios.size(); ++k) {
        const auto& sc = in.scenarios.scenarios()[k];
        const auto clearing = clearing_payments(net.with_cash(sc.cash), c.bound, options.centralized);
        exact = exact && clearing.exact;
        json entry = {{"probability", rational_to_json(sc.probability)},
                      {"payments", rationals_to_json(clearing.payments)},
                      {"net_worths", rationals_to_json(clearing.net_worths)},
                      {"defaulting", booleans(clearing.defaulting)},
                      {"iterations", clearing.iterations},
                      {"exact", clearing.exact}};
        if (net.has_society) entry["society_receipts"] = rational_to_json(clearing.net_worths[0] - sc.cash[0]);
        scenarios.push_back(std::move(entry));
        for (std::size_t i = 0; i < net.node_count; ++i)
            expected[i] += sc.probability * positive_part(clearing.net_worths[i]);
    }
    return {{"bound", to_string(c.bound)},
            {"scenarios", scenarios},
            {"expected_cash", rationals_to_json(expected)},
            {"objective", weighted(expected, in.objective)},
            {"exact", exact}};
}

json block_json(const Block& block, std::size_t index) {
    json thresholds = json::object();
    for (const auto& [payer, fee] : block.thresholds) thresholds[std::to_string(payer)] = fee;
    return {{"index", index},
            {"pairs", pairs_json(block.pairs)},
            {"realized", bids_to_json(block.realized)},
            {"thresholds", thresholds},
            {"miner_fee", rational_to_json(block.miner_fee)},
            {"volume", rational_to_json(block.volume)}};
}

json chain_command(const LoadedInputs& in, const RunConfig& c) {
    json result;
    const BidSchedule bids = schedule_or_zero(in, c, result);
    FinancialNetwork net = in.problem.network;
    if (c.scenario) {
        if (*c.scenario >= in.scenarios.size())
            throw ValidationError("scenario index " + std::to_string(*c.scenario) + " out of range");
        net = net.with_cash(in.scenarios.scenarios()[*c.scenario].cash);
    }
    auto options = evaluation_options(c).chain;
    options.record_blocks = true;
    const ChainTrace trace = run_chain(net, bids, options);
    const LimitingCash limit = limiting_cash(trace);

    json blocks = json::array();
    for (std::size_t t = 0; t < trace.blocks.size(); ++t) {
        json b = block_json(trace.blocks[t], t + 1);
        b["cash_after"] = rationals_to_json(trace.cash[t + 1]);
        blocks.push_back(std::move(b));
    }
    result["initial_cash"] = rationals_to_json(trace.cash.front());
    result["blocks"] = std::move(blocks);
    result["block_count"] = trace.block_count;
    result["termination"] = to_string(trace.reason);
    result["final_cash"] = rationals_to_json(trace.final_cash);
    result["final_residuals"] = bids_to_json(trace.final_residuals.atoms);
    result["limit_exact"] = limit.exact;
    result["remaining_mass"] = rational_to_json(limit.remaining_mass);

    if (net.block_capacity >= net.obligations().size()) {
        TerminalOptions topt;
        topt.tol = c.tol;
        topt.max_iter = c.max_iter;
        const auto terminal = solve_terminal(net, bids, Bound::Greatest, topt);
        const auto report = consistency_check(trace, terminal, 1e-6);
        result["limit_comparison"] = {{"terminal_cash", rationals_to_json(report.terminal_cash)},
                                      {"max_gap", report.max_gap},
                                      {"ok", report.ok}};
    }
    return result;
}

json terminal_json(const TerminalClearing& t) {
    json shares = json::array();
    for (std::size_t i = 0; i < t.shares.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < t.shares.cols(); ++j) row.push_back(to_exact_string(t.shares(i, j)));
        shares.push_back(std::move(row));
    }
    return {{"net_worths", rationals_to_json(t.net_worths)},
            {"cash", rationals_to_json(t.cash())},
            {"thresholds", t.thresholds},
            {"solvent", booleans(t.solvent)},
            {"shares", shares},
            {"iterations", t.iterations},
            {"residual", t.residual},
            {"exact", t.exact}};
}

json limit_command(const LoadedInputs& in, const RunConfig& c) {
    json result;
    const BidSchedule bids = schedule_or_zero(in, c, result);
    const auto& base = in.problem.network;
    const auto options = evaluation_options(c).limit;
    json scenarios = json::array();
    std::vector<Rational> expected(base.node_count, Rational(0));
    for (const auto& sc : in.scenarios.scenarios()) {
        const FinancialNetwork net = base.with_cash(sc.cash);
        initial_cash(net);
        const auto greatest = solve_terminal(net, bids, Bound::Greatest, options);
        const auto least = solve_terminal(net, bids, Bound::Least, options);
        Rational gap = 0;
        for (std::size_t i = 0; i < net.node_count; ++i)
            gap = std::max(gap, abs_value(greatest.net_worths[i] - least.net_worths[i]));
        json entry = {{"probability", rational_to_json(sc.probability)},
                      {"greatest", terminal_json(greatest)},
                      {"least", terminal_json(least)},
                      {"bound_gap", rational_to_json(gap)},
                      {"accounting_gap", rational_to_json(equity_accounting_gap(net, bids, greatest))}};
        if (base.has_society) entry["society_receipts"] = rational_to_json(greatest.net_worths[0] - sc.cash[0]);
        scenarios.push_back(std::move(entry));
        const auto& chosen = c.bound == Bound::Greatest ? greatest : least;
        for (std::size_t i = 0; i < net.node_count; ++i) expected[i] += sc.probability * positive_part(chosen.net_worths[i]);
    }
    result["uniqueness_condition"] = uniqueness_check(base);
    result["bound"] = to_string(c.bound);
    result["scenarios"] = std::move(scenarios);
    result["expected_cash"] = rationals_to_json(expected);
    result["objective"] = weighted(expected, in.objective);
    return result;
}

json mixture_json(const std::vector<Rational>& p) { return rationals_to_json(p); }

json nash_command(const LoadedInputs& in, const RunConfig& c) {
    const auto& net = in.problem.network;
    const auto& disc = in.problem.discretization;
    const auto options = evaluation_options(c);
    const Rational tol = parse_rational(c.equilibrium_tol);

    std::vector<std::size_t> players = c.players;
    if (players.empty())
        for (std::size_t i = 0; i < net.node_count; ++i)
            if (!net.incoming_obligations(i).empty()) players.push_back(i);

    std::vector<StrategySpace> spaces;
    for (std::size_t p : players) spaces.push_back(make_strategy_space(net, disc, p, c.space, c.enumeration_budget));

    json result;
    BidMap fixed = in.bids ? *in.bids : all_or_nothing(net, disc, zero_fee_assignment(net)).entries();
    result["fixed_bids_source"] = in.bids ? "file" : "zero-fee default";
    result["players"] = players;
    json space_sizes = json::array();
    for (const auto& s : spaces) space_sizes.push_back(s.size());
    result["space"] = to_string(c.space);
    result["space_sizes"] = space_sizes;
    result["mode"] = to_string(c.nash_mode);

    const PayoffTable table = payoff_table(net, disc, in.scenarios, spaces, fixed, options, c.enumeration_budget);
    result["baselines"] = rationals_to_json(table.baselines);
    result["table_exact"] = table.exact;

    switch (c.nash_mode) {
        case NashMode::PureScan: {
            json list = json::array();
            for (const auto& profile : pure_nash_scan(table, tol)) {
                json labels = json::array();
                for (std::size_t k = 0; k < profile.size(); ++k) labels.push_back(table.labels[k][profile[k]]);
                list.push_back({{"profile", profile},
                                {"labels", labels},
                                {"payoffs", rationals_to_json(table.payoffs[table.index_of(profile)])}});
            }
            result["equilibria"] = std::move(list);
            result["count"] = result["equilibria"].size();
            break;
        }
        case NashMode::SymmetricMixed: {
            json list = json::array();
            for (const auto& eq : symmetric_mixed_equilibrium(table, tol)) {
                list.push_back({{"probabilities", mixture_json(eq.probabilities)},
                                {"support", eq.support},
                                {"support_labels",
                                 [&] {
                                     json l = json::array();
                                     for (auto s : eq.support) l.push_back(table.labels[0][s]);
                                     return l;
                                 }()},
                                {"payoff", rational_to_json(eq.payoff)},
                                {"expected_payout", rational_to_json(eq.payoff - table.baselines[0])}});
            }
            result["equilibria"] = std::move(list);
            break;
        }
        case NashMode::SupportEnumeration: {
            json list = json::array();
            for (const auto& eq : two_player_equilibria(table, tol, c.enumeration_budget)) {
                list.push_back({{"row", mixture_json(eq.row)},
                                {"column", mixture_json(eq.column)},
                                {"payoffs", rationals_to_json({eq.row_payoff, eq.column_payoff})},
                                {"expected_payouts", rationals_to_json({eq.row_payoff - table.baselines[0],
                                                                        eq.column_payoff - table.baselines[1]})}});
            }
            result["equilibria"] = std::move(list);
            break;
        }
        case NashMode::FictitiousPlay: {
            const auto report = fictitious_play(table, c.rounds, c.seed);
            std::vector<double> payouts;
            for (std::size_t k = 0; k < report.payoffs.size(); ++k)
                payouts.push_back(report.payoffs[k] - to_double(table.baselines[k]));
            result["frequencies"] = report.profile;
            result["payoffs"] = report.payoffs;
            result["expected_payouts"] = payouts;
            result["deviation_gains"] = report.deviation_gains;
            result["max_deviation_gain"] = report.max_deviation_gain;
            result["rounds"] = report.rounds;
            result["note"] = report.note;
            break;
        }
    }
    return result;
}

json local_json(const LocalOptimalityReport& r) {
    return {{"base_objective", rational_to_json(r.base_objective)},
            {"max_gain", rational_to_json(r.max_gain)},
            {"best_deviation", {{"from", r.best_pair.from}, {"to", r.best_pair.to}, {"fee_num", r.best_fee}}},
            {"locally_optimal", r.locally_optimal()},
            {"evaluations", r.evaluations}};
}

json pareto_command(const LoadedInputs& in, const RunConfig& c) {
    const auto& net = in.problem.network;
    const auto& disc = in.problem.discretization;
    ParetoOptions options;
    options.starts = c.starts;
    options.max_sweeps = c.max_sweeps;
    options.seed = c.seed;
    options.evaluation = evaluation_options(c);

    json result;
    FeeAssignment start = zero_fee_assignment(net);
    const ParetoResult best = pareto_coordinate_ascent(net, disc, in.scenarios, in.objective, start, options);
    json starts = json::array();
    for (std::size_t s = 0; s < best.start_objectives.size(); ++s)
        starts.push_back({{"objective", rational_to_json(best.start_objectives[s])}, {"sweeps", best.start_sweeps[s]}});
    result["fees"] = fees_to_json(best.fees);
    result["bids"] = bids_to_json(best.bids.entries());
    result["objective"] = rational_to_json(best.objective);
    result["best_start"] = best.best_start;
    result["starts"] = std::move(starts);
    result["evaluations"] = best.evaluations;
    result["local_check"] = local_json(
        local_optimality_check(net, disc, in.scenarios, in.objective, best.bids, options.evaluation));

    EvaluationOptions central = options.evaluation;
    central.evaluator = Evaluator::Centralized;
    result["centralized_objective"] =
        rational_to_json(pareto_objective(net, in.scenarios, best.bids, in.objective, central));

    if (in.bids) {
        const BidSchedule given = make_schedule(net, disc, *in.bids, c.pad_zero_fee);
        result["given_bids"] = local_json(
            local_optimality_check(net, disc, in.scenarios, in.objective, given, options.evaluation));
    }
    return result;
}

json error_record(const RunConfig& config, const char* kind, int code, const std::string& message,
                  const std::vector<std::string>& details = {}, const std::string& location = {}) {
    json record = {{"schema", kErrorSchema},
                   {"command", config.subcommand},
                   {"status", "error"},
                   {"kind", kind},
                   {"exit_code", code},
                   {"message", message},
                   {"details", details}};
    if (!location.empty()) record["location"] = location;
    return record;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
    RunOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
        check_config(config);
        const bool is_validate = config.subcommand == "validate";
        const LoadedInputs in = load_inputs({config.network_path, config.bids_path, config.scenarios_path}, !is_validate);

        json result;
        if (is_validate) result = validate_command(in);
        else if (config.subcommand == "clear-centralized") result = centralized_command(in, config);
        else if (config.subcommand == "simulate-chain") result = chain_command(in, config);
        else if (config.subcommand == "solve-limit") result = limit_command(in, config);
        else if (config.subcommand == "solve-nash") result = nash_command(in, config);
        else if (config.subcommand == "solve-pareto") result = pareto_command(in, config);
        else throw ParseError("unknown subcommand \"" + config.subcommand + "\"", "subcommand");

        outcome.report = {{"schema", kReportSchema},
                          {"command", config.subcommand},
                          {"status", "ok"},
                          {"config", config_to_json(config)},
                          {"inputs", in.record},
                          {"result", std::move(result)}};
    } catch (const ParseError& e) {
        outcome.exit_code = kExitParse;
        outcome.report = error_record(config, "parse", kExitParse, e.what(), {}, e.location());
    } catch (const ValidationError& e) {
        outcome.exit_code = kExitValidation;
        outcome.report = error_record(config, "validation", kExitValidation, e.what(), e.details());
    } catch (const BudgetExceededError& e) {
        outcome.exit_code = kExitSolver;
        outcome.report = error_record(config, "budget", kExitSolver, e.what());
        outcome.report["required"] = e.required();
        outcome.report["budget"] = e.budget();
    } catch (const ConvergenceError& e) {
        outcome.exit_code = kExitSolver;
        outcome.report = error_record(config, "convergence", kExitSolver, e.what());
        outcome.report["iterations"] = e.iterations();
        outcome.report["residual"] = e.residual();
        outcome.report["last_iterate"] = e.last_iterate();
    } catch (const SolverError& e) {
        outcome.exit_code = kExitSolver;
        outcome.report = error_record(config, "solver", kExitSolver, e.what());
    } catch (const std::exception& e) {
        outcome.exit_code = kExitInternal;
        outcome.report = error_record(config, "internal", kExitInternal, e.what());
    }
    outcome.report["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!config.out_path.empty()) {
        std::ofstream out(config.out_path);
        if (!out) {
            outcome.exit_code = kExitInternal;
            outcome.report = error_record(config, "internal", kExitInternal, "cannot write " + config.out_path);
        } else {
            out << outcome.report.dump(2) << "\n";
        }
    }
    return outcome;
}

}  // namespace bcclear
