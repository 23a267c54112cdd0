#include "bcclear/io.hpp"

#include "bcclear/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <set>

namespace bcclear {

json parse_json_text(std::string_view text, const std::string& source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("JSON syntax error: " + std::string(e.what()),
                         source + ":" + std::to_string(line) + ":" + std::to_string(column));
    }
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int k = 0; k < length; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", digest[k]);
        hex += buf;
    }
    return hex;
}

Rational rational_from_json(const json& value, const std::string& location) {
    try {
        if (value.is_string()) return parse_rational(value.get<std::string>());
        if (value.is_number_integer()) return parse_rational(value.dump());
        if (value.is_number_float()) return parse_rational(value.dump());
    } catch (const ParseError& e) {
        throw ParseError(e.what(), location);
    }
    throw ParseError("expected a number or decimal string, got " + std::string(value.type_name()), location);
}

json rational_to_json(const Rational& value) { return {{"exact", to_exact_string(value)}, {"approx", to_double(value)}}; }

json rationals_to_json(const std::vector<Rational>& values) {
    json out = json::array();
    for (const auto& v : values) out.push_back(rational_to_json(v));
    return out;
}

namespace {

const json& require(const json& object, const char* key, const std::string& where) {
    if (!object.is_object()) throw ParseError("expected an object", where);
    auto it = object.find(key);
    if (it == object.end()) throw ParseError(std::string("missing field \"") + key + "\"", where);
    return *it;
}

long integer_field(const json& value, const std::string& location) {
    if (!value.is_number_integer()) throw ParseError("expected an integer", location);
    return value.get<long>();
}

std::size_t index_field(const json& value, const std::string& location, std::size_t bound) {
    const long v = integer_field(value, location);
    if (v < 0 || static_cast<std::size_t>(v) >= bound)
        throw ParseError("node index " + std::to_string(v) + " outside [0, " + std::to_string(bound) + ")", location);
    return static_cast<std::size_t>(v);
}

std::vector<Rational> rational_list(const json& value, const std::string& location) {
    if (!value.is_array()) throw ParseError("expected an array", location);
    std::vector<Rational> out;
    for (std::size_t k = 0; k < value.size(); ++k) out.push_back(rational_from_json(value[k], location + "/" + std::to_string(k)));
    return out;
}

Rational optional_rational(const json& object, const char* key, Rational fallback) {
    auto it = object.find(key);
    return it == object.end() ? fallback : rational_from_json(*it, std::string("/") + key);
}

}  // namespace

std::optional<ScenarioSet> parse_scenarios(const json& document) {
    auto it = document.find("scenarios");
    if (it == document.end()) return std::nullopt;
    if (!it->is_array() || it->empty()) throw ParseError("expected a non-empty array", "/scenarios");
    std::vector<Scenario> list;
    for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string where = "/scenarios/" + std::to_string(k);
        const json& entry = (*it)[k];
        list.push_back({rational_from_json(require(entry, "prob", where), where + "/prob"),
                        rational_list(require(entry, "cash", where), where + "/cash")});
    }
    return ScenarioSet(std::move(list));
}

std::optional<ObjectiveSpec> parse_objective(const json& document, std::size_t node_count) {
    auto it = document.find("objective");
    if (it == document.end()) return std::nullopt;
    ObjectiveSpec spec = ObjectiveSpec::uniform(node_count);
    if (it->contains("utility")) {
        const json& u = (*it)["utility"];
        if (u != "positive_part")
            throw ParseError("unsupported utility " + u.dump() + " (only \"positive_part\")", "/objective/utility");
    }
    if (it->contains("weights")) spec.weights = rational_list((*it)["weights"], "/objective/weights");
    spec.check(node_count);
    return spec;
}

NetworkDocument parse_network(const json& document) {
    if (!document.is_object()) throw ParseError("network document must be an object", "/");
    NetworkDocument out;
    FinancialNetwork& net = out.network;

    const long nodes = integer_field(require(document, "n", "/"), "/n");
    if (nodes < 1) throw ParseError("need at least one node", "/n");
    net.node_count = static_cast<std::size_t>(nodes);
    net.cash = rational_list(require(document, "cash", "/"), "/cash");
    net.liabilities = Matrix<Rational>(net.node_count, net.node_count, Rational(0));
    const bool dense = document.contains("liabilities");
    const bool sparse = document.contains("obligations");
    if (dense == sparse) throw ParseError("give exactly one of \"liabilities\" or \"obligations\"", "/");
    if (dense) {
        const json& rows = document["liabilities"];
        if (!rows.is_array() || rows.size() != net.node_count)
            throw ParseError("expected " + std::to_string(net.node_count) + " rows", "/liabilities");
        for (std::size_t i = 0; i < net.node_count; ++i) {
            const auto row = rational_list(rows[i], "/liabilities/" + std::to_string(i));
            if (row.size() != net.node_count)
                throw ParseError("expected " + std::to_string(net.node_count) + " entries",
                                 "/liabilities/" + std::to_string(i));
            for (std::size_t j = 0; j < net.node_count; ++j) net.liabilities(i, j) = row[j];
        }
    } else {
        const json& list = document["obligations"];
        if (!list.is_array()) throw ParseError("expected an array", "/obligations");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string where = "/obligations/" + std::to_string(k);
            const std::size_t i = index_field(require(list[k], "from", where), where + "/from", net.node_count);
            const std::size_t j = index_field(require(list[k], "to", where), where + "/to", net.node_count);
            net.liabilities(i, j) += rational_from_json(require(list[k], "amount", where), where + "/amount");
        }
    }
    net.collateral_level = optional_rational(document, "mu", 0);
    net.recovery_rate = optional_rational(document, "alpha", 1);
    net.rehypothecation_fee = optional_rational(document, "f_R", 0);
    if (document.contains("block_capacity")) {
        const long c = integer_field(document["block_capacity"], "/block_capacity");
        if (c < 0) throw ParseError("block capacity must be nonnegative", "/block_capacity");
        net.block_capacity = static_cast<std::size_t>(c);
    } else {
        net.block_capacity = net.node_count * net.node_count;
    }
    if (document.contains("society")) {
        if (!document["society"].is_boolean()) throw ParseError("expected true or false", "/society");
        net.has_society = document["society"].get<bool>();
    }

    const json& disc = require(document, "discretization", "/");
    out.discretization.bid_denominator =
        integer_field(require(disc, "D", "/discretization"), "/discretization/D");
    out.discretization.fee_denominator = static_cast<int>(
        integer_field(require(disc, "F", "/discretization"), "/discretization/F"));

    out.scenarios = parse_scenarios(document);
    out.objective = parse_objective(document, net.node_count);
    return out;
}

BidMap parse_bids(const json& document, const FinancialNetwork& network) {
    const std::size_t n = network.node_count;
    BidMap bids;
    if (document.is_object() && document.contains("fees")) {
        FeeNum default_fee = 0;
        if (document.contains("default_fee_num"))
            default_fee = static_cast<FeeNum>(integer_field(document["default_fee_num"], "/default_fee_num"));
        FeeAssignment fees;
        for (const Pair& pair : network.obligations()) fees[pair] = default_fee;
        const json& list = document["fees"];
        if (!list.is_array()) throw ParseError("expected an array", "/fees");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string where = "/fees/" + std::to_string(k);
            const Pair pair{index_field(require(list[k], "from", where), where + "/from", n),
                            index_field(require(list[k], "to", where), where + "/to", n)};
            if (!fees.count(pair)) throw ValidationError("fee given for " + to_string(pair) + ", which has no obligation");
            fees[pair] = static_cast<FeeNum>(integer_field(require(list[k], "fee_num", where), where + "/fee_num"));
        }
        for (const auto& [pair, fee] : fees) {
            const Rational amount = network.unsecured(pair.from, pair.to);
            if (amount > 0) bids[pair] = AtomMap{{fee, amount}};
        }
        return bids;
    }

    const json* list = &document;
    std::string prefix;
    if (document.is_object()) {
        list = &require(document, "bids", "/");
        prefix = "/bids";
    }
    if (!list->is_array()) throw ParseError("expected an array of bids", prefix.empty() ? "/" : prefix);
    std::set<Pair> seen;
    for (std::size_t k = 0; k < list->size(); ++k) {
        const std::string where = prefix + "/" + std::to_string(k);
        const json& entry = (*list)[k];
        const Pair pair{index_field(require(entry, "from", where), where + "/from", n),
                        index_field(require(entry, "to", where), where + "/to", n)};
        if (!seen.insert(pair).second) throw ParseError("duplicate bid entry for " + to_string(pair), where);
        const json& atoms = require(entry, "atoms", where);
        if (!atoms.is_array()) throw ParseError("expected an array", where + "/atoms");
        AtomMap& out = bids[pair];
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            const std::string at = where + "/atoms/" + std::to_string(a);
            const FeeNum fee = static_cast<FeeNum>(integer_field(require(atoms[a], "fee_num", at), at + "/fee_num"));
            out[fee] += rational_from_json(require(atoms[a], "amount", at), at + "/amount");
        }
    }
    return bids;
}

json bids_to_json(const BidMap& bids) {
    json list = json::array();
    for (const auto& [pair, atoms] : bids) {
        json a = json::array();
        for (const auto& [fee, amount] : atoms) a.push_back({{"fee_num", fee}, {"amount", to_exact_string(amount)}});
        list.push_back({{"from", pair.from}, {"to", pair.to}, {"atoms", std::move(a)}});
    }
    return list;
}

json fees_to_json(const FeeAssignment& fees) {
    json list = json::array();
    for (const auto& [pair, fee] : fees) list.push_back({{"from", pair.from}, {"to", pair.to}, {"fee_num", fee}});
    return list;
}

json network_to_json(const FinancialNetwork& network, const Discretization& disc) {
    json cash = json::array();
    for (const auto& c : network.cash) cash.push_back(to_exact_string(c));
    json rows = json::array();
    for (std::size_t i = 0; i < network.node_count; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < network.node_count; ++j) row.push_back(to_exact_string(network.liabilities(i, j)));
        rows.push_back(std::move(row));
    }
    return {{"n", network.node_count},
            {"society", network.has_society},
            {"cash", std::move(cash)},
            {"liabilities", std::move(rows)},
            {"mu", to_exact_string(network.collateral_level)},
            {"alpha", to_exact_string(network.recovery_rate)},
            {"f_R", to_exact_string(network.rehypothecation_fee)},
            {"block_capacity", network.block_capacity},
            {"discretization", {{"D", disc.bid_denominator}, {"F", disc.fee_denominator}}}};
}

}  // namespace bcclear
