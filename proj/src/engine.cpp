#include "pupow/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pupow {

// ---------------------------------------------------------------------------
// Fallback hash puzzle
// ---------------------------------------------------------------------------

BigInt fallback_threshold(std::uint64_t difficulty_millibits) {
    // floor(2^(256 - d)) with d = millibits/1000. The fractional factor is
    // carried at 62 bits of precision, far below the statistical resolution
    // any difficulty test can observe.
    if (difficulty_millibits >= 256000) {
        return difficulty_millibits == 256000 ? BigInt(1) : BigInt(0);
    }
    std::uint64_t e = 256000 - difficulty_millibits;
    std::uint64_t ipart = e / 1000;
    std::uint64_t frac = e % 1000;
    if (frac == 0) {
        return BigInt(1) << ipart;
    }
    long double factor = std::exp2l(static_cast<long double>(frac) / 1000.0L);
    auto scaled = static_cast<std::uint64_t>(std::llroundl(factor * (1ull << 62)));
    return (BigInt(scaled) << ipart) >> 62;
}

bool fallback_check_millibits(const Digest256& h, std::uint64_t difficulty_millibits) {
    return le_scalar(h) < fallback_threshold(difficulty_millibits);
}

bool fallback_check(const Digest256& h, double difficulty_bits) {
    return fallback_check_millibits(h, to_millibits(difficulty_bits));
}

// ---------------------------------------------------------------------------
// Proposal construction
// ---------------------------------------------------------------------------

ProblemProposal propose(const ProposalSpec& spec, const DifficultyRange& range,
                        const ProblemRegistry& registry, std::uint64_t balance) {
    if (spec.problem_type == kFallbackTag) {
        throw Error(Errc::invalid_proposal,
                    "the fallback puzzle carries no fee and is never proposed");
    }
    const ProblemType& type = registry.require(spec.problem_type);

    ProblemProposal p;
    p.problem_type = spec.problem_type;
    p.public_params = spec.public_params;
    p.target_regex = spec.target_regex;
    p.fee = spec.fee;
    p.timestamp = spec.timestamp;
    p.proposer = spec.proposer;

    type.validate_proposal(p);
    double bits = type.difficulty(p);
    if (!std::isfinite(bits)) {
        throw Error(Errc::degenerate_proposal, "instance has no solutions");
    }
    p.proposed_difficulty_millibits = to_millibits(bits);
    if (!range.contains(p.proposed_difficulty_millibits)) {
        throw Error(Errc::range,
                    "instance difficulty " + std::to_string(bits) + " bits outside range [" +
                        std::to_string(range.min_bits()) + ", " + std::to_string(range.max_bits()) +
                        "]");
    }
    if (balance < p.fee + type.bonus_fee(p)) {
        throw Error(Errc::insufficient_funds, "proposer balance cannot cover the fee");
    }

    ByteWriter w;
    w.u16(p.problem_type);
    w.u32(static_cast<std::uint32_t>(p.public_params.size()));
    w.raw(as_span(p.public_params));
    w.str(p.target_regex);
    w.u64(p.fee);
    w.u64(p.proposed_difficulty_millibits);
    w.u64(p.timestamp);
    w.account(p.proposer);
    p.authenticator = make_authenticator(as_span(spec.proposer_secret), as_span(w.bytes()));
    return p;
}

// ---------------------------------------------------------------------------
// Problem selection
// ---------------------------------------------------------------------------

std::optional<ProblemProposal> select_problem(
    const std::map<Digest256, ProblemProposal>& mempool, const MinerCapabilities& caps,
    const DifficultyRange& range, const Ledger& ledger, const ProblemRegistry& registry) {
    const ProblemProposal* best = nullptr;
    const Digest256* best_hash = nullptr;
    long double best_score = 0;

    for (const auto& [hash, p] : mempool) {
        if (!caps.solvable.count(p.problem_type)) continue;
        if (!range.contains(p.proposed_difficulty_millibits)) continue;
        const ProblemType* type = registry.find(p.problem_type);
        if (!type) continue;
        if (ledger.balance(p.proposer) < p.fee + type->bonus_fee(p)) continue;

        long double score = static_cast<long double>(p.fee) *
                            std::exp2l(-static_cast<long double>(p.proposed_difficulty_millibits) /
                                       1000.0L);
        bool better = false;
        if (!best) {
            better = true;
        } else if (score != best_score) {
            better = score > best_score;
        } else if (p.timestamp != best->timestamp) {
            better = p.timestamp < best->timestamp;
        } else {
            better = hash < *best_hash;
        }
        if (better) {
            best = &p;
            best_hash = &hash;
            best_score = score;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

CheckResult check_solution(const Digest256& h, const Block& block,
                           const ProblemRegistry& registry) {
    if (block.is_fallback()) {
        return {fallback_check_millibits(h, block.header.difficulty_millibits), false};
    }
    const ProblemType& type = registry.require(block.solved_problem->problem_type);
    return type.check(h, *block.solved_problem);
}

namespace {

void poke_nonce(HeaderBytes& raw, std::uint64_t nonce) {
    for (int i = 0; i < 8; ++i) {
        raw[kHeaderNonceOffset + i] = static_cast<std::uint8_t>(nonce >> (8 * i));
    }
}

}  // namespace

SolveOutcome solve(const Block& block_template, const ProblemRegistry& registry,
                   std::uint64_t nonce_start, std::uint64_t max_attempts) {
    if (max_attempts < 1) {
        throw Error(Errc::range, "max_attempts must be at least 1");
    }
    HeaderBytes raw = header_bytes(block_template.header);
    for (std::uint64_t k = 0; k < max_attempts; ++k) {
        std::uint64_t nonce = nonce_start + k;
        poke_nonce(raw, nonce);
        Digest256 h = hash256(ByteSpan(raw.data(), raw.size()));
        if (check_solution(h, block_template, registry).solved) {
            Block solved = block_template;
            solved.header.nonce = nonce;
            return {std::move(solved), k + 1};
        }
    }
    return {std::nullopt, max_attempts};
}

SolveOutcome solve_parallel(const Block& block_template, const ProblemRegistry& registry,
                            std::uint64_t nonce_start, std::uint64_t max_attempts,
                            std::uint64_t chunk) {
    if (max_attempts < 1) {
        throw Error(Errc::range, "max_attempts must be at least 1");
    }
    if (chunk < 1) chunk = 1;
    const std::uint64_t n_chunks = (max_attempts + chunk - 1) / chunk;
    std::atomic<std::uint64_t> best{max_attempts};

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(n_chunks); ++ci) {
        std::uint64_t lo = static_cast<std::uint64_t>(ci) * chunk;
        if (lo >= best.load(std::memory_order_relaxed)) continue;
        std::uint64_t hi = std::min(lo + chunk, max_attempts);
        HeaderBytes raw = header_bytes(block_template.header);
        for (std::uint64_t k = lo; k < hi; ++k) {
            poke_nonce(raw, nonce_start + k);
            Digest256 h = hash256(ByteSpan(raw.data(), raw.size()));
            if (check_solution(h, block_template, registry).solved) {
                std::uint64_t cur = best.load(std::memory_order_relaxed);
                while (k < cur && !best.compare_exchange_weak(cur, k)) {
                }
                break;
            }
        }
    }

    std::uint64_t offset = best.load();
    if (offset >= max_attempts) {
        return {std::nullopt, max_attempts};
    }
    Block solved = block_template;
    solved.header.nonce = nonce_start + offset;
    return {std::move(solved), offset + 1};
}

// ---------------------------------------------------------------------------
// Difficulty governance
// ---------------------------------------------------------------------------

DifficultyRange retarget(const std::vector<BlockHeader>& window, const DifficultyRange& current,
                         std::uint64_t target_interval_seconds) {
    if (window.size() < 2) {
        throw Error(Errc::range, "retarget needs a window of at least 2 blocks");
    }
    // Clamp timestamps to be non-decreasing before measuring elapsed time.
    std::uint64_t first = window.front().timestamp;
    std::uint64_t last = first;
    for (const auto& h : window) {
        last = std::max(last, h.timestamp);
    }
    std::uint64_t elapsed = last - first;

    double delta_bits;
    if (elapsed == 0) {
        delta_bits = 2.0;
    } else {
        double ratio = static_cast<double>(window.size()) *
                       static_cast<double>(target_interval_seconds) /
                       static_cast<double>(elapsed);
        delta_bits = std::clamp(std::log2(ratio), -2.0, 2.0);
    }

    auto delta = static_cast<std::int64_t>(std::llround(delta_bits * 1000.0));
    std::uint64_t span = current.max_millibits - current.min_millibits;
    std::int64_t new_min = static_cast<std::int64_t>(current.min_millibits) + delta;
    if (new_min < 1000) new_min = 1000;  // floor at 1 bit, span preserved
    DifficultyRange next;
    next.min_millibits = static_cast<std::uint64_t>(new_min);
    next.max_millibits = next.min_millibits + span;
    return next;
}

SolveGrade grade_value(double value, double y_regular, std::optional<double> y_bonus) {
    if (y_bonus && *y_bonus > y_regular) {
        throw Error(Errc::config, "bonus target must not be easier than the regular target");
    }
    if (!(value < y_regular)) return SolveGrade::unsolved;  // NaN lands here
    if (y_bonus && value < *y_bonus) return SolveGrade::solved_with_bonus;
    return SolveGrade::solved;
}

SolveGrade dual_target_check(const Digest256& h, const std::function<double(const Digest256&)>& f,
                             double y_regular, std::optional<double> y_bonus) {
    if (y_bonus && *y_bonus > y_regular) {
        throw Error(Errc::config, "bonus target must not be easier than the regular target");
    }
    return grade_value(f(h), y_regular, y_bonus);
}

// ---------------------------------------------------------------------------
// Monte Carlo measurement
// ---------------------------------------------------------------------------

Digest256 sample_digest(std::uint64_t seed, std::uint64_t index) {
    ByteWriter w;
    w.u64(seed);
    w.u64(index);
    return hash256(as_span(w.bytes()));
}

double measure_solve_rate_serial(const std::function<bool(const Digest256&)>& pred,
                                 std::uint64_t n, std::uint64_t seed) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (pred(sample_digest(seed, i))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double measure_solve_rate(const std::function<bool(const Digest256&)>& pred, std::uint64_t n,
                          std::uint64_t seed) {
    std::uint64_t hits = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : hits) schedule(static)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        if (pred(sample_digest(seed, static_cast<std::uint64_t>(i)))) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace pupow
