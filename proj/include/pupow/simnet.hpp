#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pupow/chain.hpp"
#include "pupow/codec.hpp"

namespace pupow::sim {

struct MinerConfig {
    std::string name;
    double hash_power = 1.0;  // attempts per simulated second
    std::set<std::uint16_t> solvable{0, 1, 4, 5, 6};
};

struct PuzzlerConfig {
    std::string name;
    double rate = 0.1;  // proposals per simulated second
    std::uint64_t fee = 0;
    std::uint64_t fee_jitter = 0;                      // uniform extra on top of fee
    std::vector<std::pair<std::uint16_t, double>> types{{6, 1.0}};  // (tag, weight)
};

struct PowerStep {
    std::uint64_t height = 0;
    double factor = 1.0;
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::string scenario = "decentralized";  // or "centralized"
    std::uint64_t total_blocks = 100;
    double target_interval = 10.0;  // simulated seconds
    std::uint64_t block_reward = 50;
    double range_min_bits = 8.0;
    double range_max_bits = 12.0;
    std::uint32_t retarget_window = 32;
    double fallback_extra_bits = 0.0;
    double propagation_delay = 0.0;  // 0 = instant, no forks
    std::optional<PowerStep> power_step;
    std::optional<std::uint64_t> halt_proposals_at_height;
    std::vector<MinerConfig> miners;
    std::vector<PuzzlerConfig> puzzlers;
};

SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& config);

struct BlockRecord {
    std::uint64_t height = 0;
    std::string miner;
    std::uint16_t problem_type = 0;  // 0 = fallback
    std::uint64_t difficulty_millibits = 0;
    double solve_time = 0.0;
    double interval = 0.0;
    std::uint64_t attempts = 0;  // network attempts since the previous block
    std::uint64_t fee = 0;
    DifficultyRange range_after;
};

struct SimReport {
    std::uint64_t total_blocks = 0;
    std::uint64_t fallback_blocks = 0;
    std::vector<std::string> miner_names;
    std::vector<std::uint64_t> miner_blocks;
    std::vector<double> miner_shares;
    std::map<std::uint16_t, std::uint64_t> solved_by_type;
    std::vector<BlockRecord> blocks;
    double mean_interval = 0.0;
    double mean_attempts = 0.0;
    std::uint64_t fees_paid = 0;
    std::uint64_t skipped_proposals = 0;
    std::string tip_hash;
    std::map<std::string, std::uint64_t> final_balances;  // account hex -> balance
    bool conservation_ok = false;
    bool no_reuse_ok = false;
};

nlohmann::json report_to_json(const SimReport& report);
std::string report_summary(const SimReport& report);

/// Deterministic discrete-event run. When store_path is nonempty the active
/// chain is persisted there as a chain store.
SimReport run(const SimConfig& config, const std::string& store_path = "");

/// Centralized-scenario denial of service: the setter stops proposing at
/// halt_height; the chain must continue on fallback blocks.
SimReport attack_scenario_dos(SimConfig config, std::uint64_t halt_height,
                              const std::string& store_path = "");

/// Class-chain regex over the given length whose exact difficulty lands
/// within [min_bits, max_bits]; free_prefix leading positions are left
/// unconstrained. Used by simulated puzzlers to hit the current range.
std::string pattern_for_difficulty(int length, double target_bits, double min_bits,
                                   double max_bits, std::uint64_t rng_seed, int free_prefix = 0);

AccountId account_from_name(const std::string& name);

}  // namespace pupow::sim
