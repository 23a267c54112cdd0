#pragma once

#include "bcclear/bids.hpp"
#include "bcclear/network.hpp"
#include "bcclear/scenarios.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace bcclear {

using nlohmann::json;

inline constexpr const char* kReportSchema = "bcclear.report/1";
inline constexpr const char* kErrorSchema = "bcclear.error/1";

/// Parses JSON text; syntax errors become ParseError with "source:line:column".
json parse_json_text(std::string_view text, const std::string& source);

std::string sha256_hex(std::string_view bytes);

/// Reads "amount"-like fields: decimal or fraction strings, integers, or JSON numbers (via their shortest text).
Rational rational_from_json(const json& value, const std::string& location);

/// {"exact": "5.825", "approx": 5.825}
json rational_to_json(const Rational& value);
json rationals_to_json(const std::vector<Rational>& values);

struct NetworkDocument {
    FinancialNetwork network;
    Discretization discretization;
    std::optional<ScenarioSet> scenarios;
    std::optional<ObjectiveSpec> objective;
};

/// Network file: n, cash, liabilities (dense n x n) or obligations (sparse
/// {from, to, amount} list), mu, alpha, f_R, block_capacity, society,
/// discretization {D, F}, and optional scenarios [{prob, cash}] / objective.
NetworkDocument parse_network(const json& document);

/// Scenario and objective fields of a network or scenarios file.
std::optional<ScenarioSet> parse_scenarios(const json& document);
std::optional<ObjectiveSpec> parse_objective(const json& document, std::size_t node_count);

/// Bids file: a list of {from, to, atoms: [{fee_num, amount}]} (optionally
/// wrapped as {"bids": [...]}), or {"fees": [{from, to, fee_num}], "default_fee_num": 0} meaning
/// all-or-nothing bids on the unsecured part of each obligation.
BidMap parse_bids(const json& document, const FinancialNetwork& network);

json bids_to_json(const BidMap& bids);
json fees_to_json(const FeeAssignment& fees);
json network_to_json(const FinancialNetwork& network, const Discretization& disc);

}  // namespace bcclear
