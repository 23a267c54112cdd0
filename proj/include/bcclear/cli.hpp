#pragma once

#include "bcclear/centralized.hpp"
#include "bcclear/games.hpp"
#include "bcclear/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcclear {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitParse = 2, kExitValidation = 3, kExitSolver = 4 };

enum class NashMode { PureScan, SymmetricMixed, SupportEnumeration, FictitiousPlay };

struct RunConfig {
    std::string subcommand;
    std::string network_path;
    std::string bids_path;
    std::string scenarios_path;
    std::string out_path;

    double tol = 1e-10;
    std::size_t max_iter = 10'000;
    std::string volume_epsilon = "1e-12";
    std::size_t max_blocks = 10'000;
    double enumeration_budget = 1e6;
    std::uint64_t seed = 0;
    Evaluator evaluator = Evaluator::Limit;
    bool pad_zero_fee = false;
    bool greedy_fallback = false;
    bool random_ties = false;
    Bound bound = Bound::Greatest;
    std::optional<std::size_t> scenario;

    NashMode nash_mode = NashMode::PureScan;
    std::vector<std::size_t> players;
    SpaceMode space = SpaceMode::AllOrNothing;
    std::size_t rounds = 10'000;
    /// Payoff tolerance for equilibrium checks, as a decimal string.
    std::string equilibrium_tol = "1e-9";

    std::size_t starts = 8;
    std::size_t max_sweeps = 100;
};

const char* to_string(NashMode mode);
NashMode parse_nash_mode(const std::string& text);
Evaluator parse_evaluator(const std::string& text);
SpaceMode parse_space(const std::string& text);
Bound parse_bound(const std::string& text);

struct InputPaths {
    std::string network;
    std::string bids;
    std::string scenarios;
};

struct LoadedInputs {
    NetworkDocument problem;
    ScenarioSet scenarios;
    ObjectiveSpec objective;
    std::optional<BidMap> bids;
    /// {"network": {"path", "sha256", "document"}, ...} as embedded in reports.
    json record;
};

/// Reads and parses the input files. A report file given as the network path
/// replays its embedded inputs. With `check`, the network must be admissible.
LoadedInputs load_inputs(const InputPaths& paths, bool check = true);

json config_to_json(const RunConfig& config);

struct RunOutcome {
    int exit_code = kExitOk;
    json report;
};

/// Dispatches the subcommand and never throws: failures become an error
/// record with a distinct exit code. Writes the report to `out_path` when set.
RunOutcome run(const RunConfig& config);

}  // namespace bcclear
