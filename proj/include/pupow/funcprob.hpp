#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pupow/chain.hpp"
#include "pupow/codec.hpp"
#include "pupow/engine.hpp"
#include "pupow/problem.hpp"

namespace pupow::funcprob {

// Registry tags for the function-problem family.
inline constexpr std::uint16_t kUnivariateTag = 1;
inline constexpr std::uint16_t kMultivariateTag = 2;
inline constexpr std::uint16_t kRegressionTag = 3;
inline constexpr std::uint16_t kSectorTag = 4;

// Named catalog functions. Proposals carry the tag, never code.
enum class UnivariateFn : std::uint16_t {
    identity_u32 = 1,  // f(x) = x as unsigned
    float_u32 = 2,     // f(x) = the IEEE-754 float with bit pattern x
    poly_u32 = 3,      // f(x) = c0 + c1 u + c2 u^2 + c3 u^3, u = x / 2^32;
                       // c1..c3 must be nonnegative so counts stay exact
};

enum class MultivariateFn : std::uint16_t {
    sum_chunks = 1,
    parity = 2,
};

struct UnivariateProblem {
    UnivariateFn fn = UnivariateFn::identity_u32;
    std::array<double, 4> poly_coeffs{};  // poly_u32 only
    double y_regular = 0.0;
    std::optional<double> y_bonus;
    std::uint64_t bonus_fee = 0;
};

struct MultivariateProblem {
    MultivariateFn fn = MultivariateFn::sum_chunks;
    int n = 1;
    int k = 1;
    double q_lo = 0.0;
    double q_hi = 0.0;
};

struct RegressionInstance {
    int dim = 1;        // p: coefficient dimension
    int chunk_bits = 1; // k: bits per coefficient chunk
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    double loss_threshold = 0.0;
};

struct SectorProblem {
    int k = 1;
    std::uint64_t needle_seed = 0;
    std::uint64_t needle_count = 0;
};

// Canonical public_params codecs (little-endian fixed-width fields after a
// 2-byte function tag where applicable).
Bytes encode_params(const UnivariateProblem& p);
Bytes encode_params(const MultivariateProblem& p);
Bytes encode_params(const RegressionInstance& p);
Bytes encode_params(const SectorProblem& p);
UnivariateProblem decode_univariate(ByteSpan params);
MultivariateProblem decode_multivariate(ByteSpan params);
RegressionInstance decode_regression(ByteSpan params);
SectorProblem decode_sector(ByteSpan params);

/// Low 32 bits of the header hash (little-endian), the univariate input.
std::uint32_t low32(const Digest256& h);

SolveGrade univariate_check(const UnivariateProblem& prob, const Digest256& h);
double univariate_value(const UnivariateProblem& prob, std::uint32_t x);
/// Exact number of 32-bit inputs with f(x) < y; the solve probability is
/// count / 2^32.
std::uint64_t univariate_count_below(const UnivariateProblem& prob, double y);

/// Base-2^k digits of le_scalar(h), least significant first. Requires
/// n * k <= 256.
std::vector<BigInt> multivariate_split(const Digest256& h, int n, int k);
bool multivariate_check(const MultivariateProblem& prob, const Digest256& h);
/// Exact count of chunk tuples whose f value lands in Q.
BigInt multivariate_count_in_q(const MultivariateProblem& prob);

double regression_loss(const RegressionInstance& inst, const std::vector<double>& alpha);
std::vector<double> regression_alpha_from_hash(const RegressionInstance& inst, const Digest256& h);
bool regression_check(const RegressionInstance& inst, const Digest256& h);

std::vector<std::uint64_t> sector_needles(const SectorProblem& prob);
bool sector_check(const SectorProblem& prob, const Digest256& h);

// ProblemType adapters for the registry.
std::shared_ptr<const ProblemType> make_univariate_type();
std::shared_ptr<const ProblemType> make_multivariate_type();
std::shared_ptr<const ProblemType> make_regression_type();
std::shared_ptr<const ProblemType> make_sector_type();

}  // namespace pupow::funcprob
