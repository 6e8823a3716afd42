#include "pupow/registry.hpp"

#include "pupow/engine.hpp"
#include "pupow/funcprob.hpp"
#include "pupow/splitkey_dsa.hpp"
#include "pupow/splitkey_ed.hpp"

namespace pupow {

namespace {

// Bitcoin's partial hash pre-image puzzle, the problem of last resort. It is
// never proposed; blocks solving it carry the all-zero problem hash and the
// protocol-determined difficulty.
class FallbackType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kFallbackTag; }
    std::string name() const override { return "fallback-hash-puzzle"; }

    void validate_proposal(const ProblemProposal&) const override {
        throw Error(Errc::invalid_proposal,
                    "the fallback puzzle carries no fee and is never proposed");
    }

    double difficulty(const ProblemProposal& p) const override {
        return p.difficulty_bits();
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        return {fallback_check_millibits(h, p.proposed_difficulty_millibits), false};
    }
};

}  // namespace

ProblemRegistry make_default_registry() {
    ProblemRegistry registry;
    registry.register_type(std::make_shared<FallbackType>());
    registry.register_type(funcprob::make_univariate_type());
    registry.register_type(funcprob::make_multivariate_type());
    registry.register_type(funcprob::make_regression_type());
    registry.register_type(funcprob::make_sector_type());
    registry.register_type(dsa::make_vanity_type());
    registry.register_type(ed::make_vanity_type());
    return registry;
}

}  // namespace pupow
