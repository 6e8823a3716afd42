#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "pupow/chain.hpp"
#include "pupow/codec.hpp"

namespace pupow {

/// Tag 0 is reserved for the fallback hash puzzle and is never proposed.
inline constexpr std::uint16_t kFallbackTag = 0;

struct CheckResult {
    bool solved = false;
    bool bonus = false;
};

/// One registered useful-work problem type: proposal validation, difficulty
/// quantification in bits, and the per-attempt check on a header hash.
class ProblemType {
public:
    virtual ~ProblemType() = default;

    virtual std::uint16_t tag() const = 0;
    virtual std::string name() const = 0;

    /// Throws Errc::invalid_proposal (or a more specific code) when the
    /// proposal's parameters are malformed for this type.
    virtual void validate_proposal(const ProblemProposal& p) const = 0;

    /// Difficulty of the instance in bits: -log2 of the per-attempt solve
    /// probability. Throws Errc::degenerate_proposal when the instance is
    /// unsolvable.
    virtual double difficulty(const ProblemProposal& p) const = 0;

    virtual CheckResult check(const Digest256& header_hash, const ProblemProposal& p) const = 0;

    /// Extra reward transferred from the proposer when a bonus target is hit.
    virtual std::uint64_t bonus_fee(const ProblemProposal&) const { return 0; }
};

class ProblemRegistry {
public:
    void register_type(std::shared_ptr<const ProblemType> type);
    const ProblemType* find(std::uint16_t tag) const;
    const ProblemType& require(std::uint16_t tag) const;
    bool contains(std::uint16_t tag) const { return types_.count(tag) != 0; }
    const std::map<std::uint16_t, std::shared_ptr<const ProblemType>>& types() const {
        return types_;
    }

private:
    std::map<std::uint16_t, std::shared_ptr<const ProblemType>> types_;
};

}  // namespace pupow
