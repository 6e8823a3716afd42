#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pupow/codec.hpp"

namespace pupow {

class ProblemRegistry;

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

/// Coinbase transactions use the all-zero sender; the miner account is the
/// recipient and the nonce is the block height, which keeps (sender, nonce)
/// pairs unique across the chain.
inline constexpr AccountId kCoinbaseAccount{};

struct Transaction {
    AccountId from{};
    AccountId to{};
    std::uint64_t amount = 0;
    std::uint64_t fee = 0;
    std::uint64_t nonce = 0;
    Digest256 authenticator;

    bool is_coinbase() const { return from == kCoinbaseAccount; }
    auto operator<=>(const Transaction&) const = default;
};

struct ProblemProposal {
    std::uint16_t problem_type = 0;
    Bytes public_params;
    std::string target_regex;
    std::uint64_t fee = 0;
    std::uint64_t proposed_difficulty_millibits = 0;
    std::uint64_t timestamp = 0;
    AccountId proposer{};
    Digest256 authenticator;

    double difficulty_bits() const {
        return static_cast<double>(proposed_difficulty_millibits) / 1000.0;
    }
    auto operator<=>(const ProblemProposal&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
    std::vector<ProblemProposal> new_problems;
    // nullopt marks a fallback-puzzle block (problem_hash is all zeros).
    std::optional<ProblemProposal> solved_problem;

    bool is_fallback() const { return !solved_problem.has_value(); }
};

Bytes encode(const Transaction& tx);
Bytes encode(const ProblemProposal& p);
Bytes encode(const Block& b);
Transaction decode_transaction(ByteReader& r);
ProblemProposal decode_proposal(ByteReader& r);
Block decode_block(ByteSpan data);

Digest256 tx_hash(const Transaction& tx);
Digest256 proposal_hash(const ProblemProposal& p);

/// Placeholder authenticator standing in for a signature:
/// hash256(secret_seed || canonical message bytes).
Digest256 make_authenticator(ByteSpan secret_seed, ByteSpan message);

/// Binary Merkle tree with the duplicate-last-node rule for odd layers.
/// Empty input yields the all-zero digest; a single item yields hash256(item).
Digest256 merkle_root(const std::vector<Bytes>& items);
Digest256 tx_merkle_root(const std::vector<Transaction>& txs);
Digest256 problem_merkle_root(const std::vector<ProblemProposal>& problems);

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

struct Ledger {
    std::map<AccountId, std::uint64_t> balances;
    std::set<std::pair<AccountId, std::uint64_t>> applied_nonces;

    std::uint64_t balance(const AccountId& a) const {
        auto it = balances.find(a);
        return it == balances.end() ? 0 : it->second;
    }
    std::uint64_t total_supply() const {
        std::uint64_t sum = 0;
        for (const auto& [_, v] : balances) sum += v;
        return sum;
    }
};

// ---------------------------------------------------------------------------
// Chain state
// ---------------------------------------------------------------------------

struct DifficultyRange {
    std::uint64_t min_millibits = 1000;
    std::uint64_t max_millibits = 1000;

    double min_bits() const { return static_cast<double>(min_millibits) / 1000.0; }
    double max_bits() const { return static_cast<double>(max_millibits) / 1000.0; }
    bool contains(std::uint64_t millibits) const {
        return millibits >= min_millibits && millibits <= max_millibits;
    }
    auto operator<=>(const DifficultyRange&) const = default;
};

struct ProtocolParams {
    std::uint64_t block_reward = 50;
    std::uint32_t retarget_window = 32;
    std::uint64_t target_interval_seconds = 10;
    // Fallback blocks must carry difficulty d_max + this offset, exactly.
    std::uint64_t fallback_extra_millibits = 0;
    DifficultyRange initial_range{8000, 12000};
};

struct CheckLine {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    bool orphan = false;
    std::vector<CheckLine> checks;

    bool valid() const {
        if (orphan) return false;
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return !checks.empty();
    }
    std::string first_failure() const {
        if (orphan) return "orphan: unknown previous block";
        for (const auto& c : checks) {
            if (!c.pass) return c.name + ": " + c.detail;
        }
        return "";
    }
};

enum class SubmitStatus { applied, orphaned, rejected, duplicate };

struct SubmitResult {
    SubmitStatus status;
    ValidationReport report;
    bool reorged = false;
};

class ChainState {
public:
    explicit ChainState(ProtocolParams params = {});

    const ProtocolParams& params() const { return params_; }
    const Digest256& tip() const { return tip_; }
    std::uint64_t height() const { return height_; }
    const DifficultyRange& difficulty_range() const { return range_; }
    const Ledger& ledger() const { return ledger_; }
    std::uint64_t fallback_difficulty_millibits() const {
        return range_.max_millibits + params_.fallback_extra_millibits;
    }

    /// Proposals announced on-chain and not yet solved, keyed by proposal hash.
    const std::map<Digest256, ProblemProposal>& problem_mempool() const {
        return problem_mempool_;
    }
    /// Locally submitted transactions awaiting inclusion.
    const std::vector<Transaction>& tx_mempool() const { return tx_mempool_; }

    void submit_transaction(const Transaction& tx);

    /// Validate without mutating. Checks run in a fixed order; the report
    /// carries one line per check.
    ValidationReport validate_block(const Block& block, const ProblemRegistry& registry) const;

    /// Validate and, on success, apply. Side-chain blocks are stored and may
    /// trigger a reorg when their branch becomes strictly longer. Blocks with
    /// unknown parents are held as orphans and connected when the parent
    /// arrives.
    SubmitResult submit_block(const Block& block, const ProblemRegistry& registry);

    const Block* find_block(const Digest256& hash) const;
    /// Active chain block hashes, lowest height first.
    const std::vector<Digest256>& active_chain() const { return active_; }
    std::vector<const Block*> active_blocks() const;

private:
    struct Stored {
        Block block;
        std::uint64_t height = 0;
    };

    ValidationReport validate_against(const Block& block, const ProblemRegistry& registry,
                                      const Digest256& expect_parent, std::uint64_t new_height,
                                      const DifficultyRange& range, const Ledger& ledger,
                                      const std::map<Digest256, ProblemProposal>& mempool) const;
    void apply_to_tip(const Block& block, const Digest256& hash, const ProblemRegistry& registry);
    void rebuild_from_branch(const std::vector<Digest256>& branch,
                             const ProblemRegistry& registry);
    void maybe_retarget();
    void connect_orphans(const ProblemRegistry& registry);

    ProtocolParams params_;
    Digest256 tip_{};  // all zeros = genesis sentinel
    std::uint64_t height_ = 0;
    DifficultyRange range_;
    Ledger ledger_;
    std::map<Digest256, ProblemProposal> problem_mempool_;
    std::vector<Transaction> tx_mempool_;
    std::unordered_map<Digest256, Stored> blocks_;
    std::vector<Digest256> active_;
    std::multimap<Digest256, Block> orphans_;
};

/// Free-function views over ChainState, mirroring the module operations.
ValidationReport validate_block(const Block& block, const ChainState& state,
                                const ProblemRegistry& registry);
SubmitResult apply_block(const Block& block, ChainState& state, const ProblemRegistry& registry);

// ---------------------------------------------------------------------------
// Block assembly
// ---------------------------------------------------------------------------

/// Build a mining template on top of the current tip: coinbase for the miner
/// (reward + transaction fees + problem fee), the given body, and a header
/// whose roots, problem hash and difficulty are already consistent. The nonce
/// starts at zero; solving iterates it.
Block build_template(const ChainState& state, const AccountId& miner,
                     std::optional<ProblemProposal> solved, std::vector<Transaction> txs,
                     std::vector<ProblemProposal> announce, std::uint64_t timestamp);

// ---------------------------------------------------------------------------
// Persistent store: length-prefixed canonical records. Record 0 is the
// genesis record carrying the protocol parameters; records 1..N are blocks
// in height order. Loading replays and revalidates every block.
// ---------------------------------------------------------------------------

void store_create(const std::string& path, const ProtocolParams& params);
void store_append(const Block& block, const std::string& path);
/// Empty file yields a genesis-only state with default parameters.
ChainState store_load(const std::string& path, const ProblemRegistry& registry);
std::string store_export_json(const std::string& path);

}  // namespace pupow
