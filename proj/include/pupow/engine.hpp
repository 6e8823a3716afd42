#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "pupow/chain.hpp"
#include "pupow/codec.hpp"
#include "pupow/problem.hpp"

namespace pupow {

struct MinerCapabilities {
    std::set<std::uint16_t> solvable;
    double hash_power = 1.0;  // attempts per simulated second
};

// ---------------------------------------------------------------------------
// Fallback hash puzzle
// ---------------------------------------------------------------------------

/// Threshold 2^(256 - difficulty_bits), rounded down to an integer.
BigInt fallback_threshold(std::uint64_t difficulty_millibits);

/// True iff le_scalar(h) < 2^(256 - difficulty_bits).
bool fallback_check(const Digest256& h, double difficulty_bits);
bool fallback_check_millibits(const Digest256& h, std::uint64_t difficulty_millibits);

// ---------------------------------------------------------------------------
// Proposal construction
// ---------------------------------------------------------------------------

struct ProposalSpec {
    std::uint16_t problem_type = 0;
    Bytes public_params;
    std::string target_regex;
    std::uint64_t fee = 0;
    std::uint64_t timestamp = 0;
    AccountId proposer{};
    Bytes proposer_secret;  // feeds the placeholder authenticator
};

/// Build an authenticated proposal whose declared difficulty is the type's
/// own difficulty of the instance, and require it to fall inside the current
/// range. The fallback tag is never proposable. `balance` is the proposer's
/// spendable balance; the fee (plus any bonus fee) must be covered.
ProblemProposal propose(const ProposalSpec& spec, const DifficultyRange& range,
                        const ProblemRegistry& registry, std::uint64_t balance);

// ---------------------------------------------------------------------------
// Problem selection
// ---------------------------------------------------------------------------

/// Pick the mempool proposal maximizing fee / 2^difficulty among those the
/// miner can solve, with ties broken by earlier timestamp then lower proposal
/// hash. Returns nullopt when no candidate qualifies (mine the fallback).
std::optional<ProblemProposal> select_problem(
    const std::map<Digest256, ProblemProposal>& mempool, const MinerCapabilities& caps,
    const DifficultyRange& range, const Ledger& ledger, const ProblemRegistry& registry);

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

struct SolveOutcome {
    std::optional<Block> block;  // nullopt = exhausted
    std::uint64_t attempts = 0;

    bool solved() const { return block.has_value(); }
};

/// Evaluate the template's problem check for one header-hash value.
CheckResult check_solution(const Digest256& h, const Block& block,
                           const ProblemRegistry& registry);

/// Serial reference search: nonce = nonce_start, nonce_start+1, ... Returns
/// the first solving block, or exhausted after max_attempts.
SolveOutcome solve(const Block& block_template, const ProblemRegistry& registry,
                   std::uint64_t nonce_start, std::uint64_t max_attempts);

/// OpenMP search over the same nonce window, sharded in chunks. Returns the
/// lowest solving nonce in the window, so the outcome (block, attempt count)
/// is identical to the serial reference.
SolveOutcome solve_parallel(const Block& block_template, const ProblemRegistry& registry,
                            std::uint64_t nonce_start, std::uint64_t max_attempts,
                            std::uint64_t chunk = 1024);

// ---------------------------------------------------------------------------
// Difficulty governance
// ---------------------------------------------------------------------------

/// Shift the range by log2(window_size * target_interval / elapsed), clamped
/// to +/-2 bits, with d_min floored at 1 bit (the span is preserved).
/// Non-monotone timestamps are clamped to be non-decreasing first.
DifficultyRange retarget(const std::vector<BlockHeader>& window, const DifficultyRange& current,
                         std::uint64_t target_interval_seconds);

enum class SolveGrade { unsolved, solved, solved_with_bonus };

/// Dual-target grading: solved iff f(h) < y_regular, with bonus additionally
/// iff f(h) < y_bonus. The bonus target must not be easier than the regular
/// one.
SolveGrade dual_target_check(const Digest256& h, const std::function<double(const Digest256&)>& f,
                             double y_regular, std::optional<double> y_bonus);
SolveGrade grade_value(double value, double y_regular, std::optional<double> y_bonus);

// ---------------------------------------------------------------------------
// Monte Carlo measurement (OpenMP kernel with a serial reference)
// ---------------------------------------------------------------------------

/// Deterministic digest stream: hash256(seed || index), independent of
/// threading.
Digest256 sample_digest(std::uint64_t seed, std::uint64_t index);

/// Fraction of n sampled digests for which pred holds. The parallel kernel
/// and the serial reference agree exactly by construction.
double measure_solve_rate(const std::function<bool(const Digest256&)>& pred, std::uint64_t n,
                          std::uint64_t seed);
double measure_solve_rate_serial(const std::function<bool(const Digest256&)>& pred,
                                 std::uint64_t n, std::uint64_t seed);

}  // namespace pupow
