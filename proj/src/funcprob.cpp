#include "pupow/funcprob.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace pupow::funcprob {

namespace {

constexpr std::uint64_t kU32Space = 1ull << 32;

void write_f64(ByteWriter& w, double v) { w.u64(std::bit_cast<std::uint64_t>(v)); }
double read_f64(ByteReader& r) { return std::bit_cast<double>(r.u64()); }

[[noreturn]] void bad_params(const std::string& why) {
    throw Error(Errc::invalid_proposal, why);
}

}  // namespace

// ---------------------------------------------------------------------------
// Param codecs
// ---------------------------------------------------------------------------

Bytes encode_params(const UnivariateProblem& p) {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(p.fn));
    if (p.fn == UnivariateFn::poly_u32) {
        for (double c : p.poly_coeffs) write_f64(w, c);
    }
    write_f64(w, p.y_regular);
    w.u8(p.y_bonus ? 1 : 0);
    if (p.y_bonus) {
        write_f64(w, *p.y_bonus);
        w.u64(p.bonus_fee);
    }
    return w.take();
}

UnivariateProblem decode_univariate(ByteSpan params) {
    ByteReader r(params);
    UnivariateProblem p;
    p.fn = static_cast<UnivariateFn>(r.u16());
    if (p.fn == UnivariateFn::poly_u32) {
        for (double& c : p.poly_coeffs) c = read_f64(r);
    }
    p.y_regular = read_f64(r);
    if (r.u8() != 0) {
        p.y_bonus = read_f64(r);
        p.bonus_fee = r.u64();
    }
    if (!r.done()) bad_params("trailing bytes in univariate params");
    return p;
}

Bytes encode_params(const MultivariateProblem& p) {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(p.fn));
    w.u16(static_cast<std::uint16_t>(p.n));
    w.u16(static_cast<std::uint16_t>(p.k));
    write_f64(w, p.q_lo);
    write_f64(w, p.q_hi);
    return w.take();
}

MultivariateProblem decode_multivariate(ByteSpan params) {
    ByteReader r(params);
    MultivariateProblem p;
    p.fn = static_cast<MultivariateFn>(r.u16());
    p.n = r.u16();
    p.k = r.u16();
    p.q_lo = read_f64(r);
    p.q_hi = read_f64(r);
    if (!r.done()) bad_params("trailing bytes in multivariate params");
    return p;
}

Bytes encode_params(const RegressionInstance& p) {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(p.dim));
    w.u16(static_cast<std::uint16_t>(p.chunk_bits));
    w.u32(static_cast<std::uint32_t>(p.xs.size()));
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
        for (double v : p.xs[i]) write_f64(w, v);
        write_f64(w, p.ys[i]);
    }
    write_f64(w, p.loss_threshold);
    return w.take();
}

RegressionInstance decode_regression(ByteSpan params) {
    ByteReader r(params);
    RegressionInstance p;
    p.dim = r.u16();
    p.chunk_bits = r.u16();
    std::uint32_t n = r.u32();
    p.xs.resize(n);
    p.ys.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        p.xs[i].resize(p.dim);
        for (double& v : p.xs[i]) v = read_f64(r);
        p.ys[i] = read_f64(r);
    }
    p.loss_threshold = read_f64(r);
    if (!r.done()) bad_params("trailing bytes in regression params");
    return p;
}

Bytes encode_params(const SectorProblem& p) {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(p.k));
    w.u64(p.needle_seed);
    w.u64(p.needle_count);
    return w.take();
}

SectorProblem decode_sector(ByteSpan params) {
    ByteReader r(params);
    SectorProblem p;
    p.k = r.u16();
    p.needle_seed = r.u64();
    p.needle_count = r.u64();
    if (!r.done()) bad_params("trailing bytes in sector params");
    return p;
}

// ---------------------------------------------------------------------------
// Univariate
// ---------------------------------------------------------------------------

std::uint32_t low32(const Digest256& h) {
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(h.bytes[i]) << (8 * i);
    return x;
}

double univariate_value(const UnivariateProblem& prob, std::uint32_t x) {
    switch (prob.fn) {
        case UnivariateFn::identity_u32:
            return static_cast<double>(x);
        case UnivariateFn::float_u32:
            return static_cast<double>(std::bit_cast<float>(x));
        case UnivariateFn::poly_u32: {
            double u = static_cast<double>(x) / static_cast<double>(kU32Space);
            const auto& c = prob.poly_coeffs;
            return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
        }
    }
    throw Error(Errc::invalid_proposal, "unknown univariate function tag");
}

SolveGrade univariate_check(const UnivariateProblem& prob, const Digest256& h) {
    return grade_value(univariate_value(prob, low32(h)), prob.y_regular, prob.y_bonus);
}

namespace {

// Count of nonnegative-float bit patterns (0x00000000..0x7f800000, -0 and
// NaNs excluded) whose value is below y; f is increasing in the pattern.
std::uint64_t count_nonneg_float_below(double y) {
    std::uint64_t lo = 0, hi = 0x7f800000ull + 1;  // first index with f >= y
    while (lo < hi) {
        std::uint64_t mid = (lo + hi) / 2;
        double v = static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(mid)));
        if (v < y) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

// Count of negative-float patterns below y; over 0x80000000..0xff800000 the
// value decreases as the pattern grows, so the satisfying set is a suffix.
std::uint64_t count_neg_float_below(double y) {
    std::uint64_t base = 0x80000000ull;
    std::uint64_t lo = base, hi = 0xff800000ull + 1;  // first index with f < y
    while (lo < hi) {
        std::uint64_t mid = (lo + hi) / 2;
        double v = static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(mid)));
        if (v < y) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return 0xff800000ull + 1 - lo;
}

}  // namespace

std::uint64_t univariate_count_below(const UnivariateProblem& prob, double y) {
    switch (prob.fn) {
        case UnivariateFn::identity_u32: {
            if (y <= 0.0) return 0;
            double c = std::ceil(y);
            if (c >= static_cast<double>(kU32Space)) return kU32Space;
            return static_cast<std::uint64_t>(c);
        }
        case UnivariateFn::float_u32:
            return count_nonneg_float_below(y) + count_neg_float_below(y);
        case UnivariateFn::poly_u32: {
            // Nonnegative c1..c3 make f non-decreasing in x; binary search for
            // the first x with f(x) >= y.
            std::uint64_t lo = 0, hi = kU32Space;
            while (lo < hi) {
                std::uint64_t mid = (lo + hi) / 2;
                if (univariate_value(prob, static_cast<std::uint32_t>(mid)) < y) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
    }
    throw Error(Errc::invalid_proposal, "unknown univariate function tag");
}

// ---------------------------------------------------------------------------
// Multivariate
// ---------------------------------------------------------------------------

std::vector<BigInt> multivariate_split(const Digest256& h, int n, int k) {
    if (n < 1 || k < 1 || n * k > 256) {
        throw Error(Errc::range, "multivariate split requires n >= 1, k >= 1, n*k <= 256");
    }
    BigInt v = le_scalar(h);
    BigInt mask = (BigInt(1) << k) - 1;
    std::vector<BigInt> chunks;
    chunks.reserve(n);
    for (int i = 0; i < n; ++i) {
        chunks.push_back((v >> (i * k)) & mask);
    }
    return chunks;
}

namespace {

bool in_interval(double value, double lo, double hi) { return value >= lo && value <= hi; }

double multivariate_value(const MultivariateProblem& prob, const std::vector<BigInt>& chunks) {
    switch (prob.fn) {
        case MultivariateFn::sum_chunks: {
            BigInt sum = 0;
            for (const auto& c : chunks) sum += c;
            return sum.convert_to<double>();
        }
        case MultivariateFn::parity: {
            BigInt sum = 0;
            for (const auto& c : chunks) sum += c;
            return static_cast<double>(sum & 1);
        }
    }
    throw Error(Errc::invalid_proposal, "unknown multivariate function tag");
}

}  // namespace

bool multivariate_check(const MultivariateProblem& prob, const Digest256& h) {
    auto chunks = multivariate_split(h, prob.n, prob.k);
    return in_interval(multivariate_value(prob, chunks), prob.q_lo, prob.q_hi);
}

BigInt multivariate_count_in_q(const MultivariateProblem& prob) {
    const BigInt per_chunk = BigInt(1) << prob.k;
    if (prob.fn == MultivariateFn::parity) {
        BigInt space = BigInt(1) << (prob.n * prob.k);
        BigInt evens = space / 2;
        BigInt odds = space - evens;
        BigInt count = 0;
        if (in_interval(0.0, prob.q_lo, prob.q_hi)) count += evens;
        if (in_interval(1.0, prob.q_lo, prob.q_hi)) count += odds;
        return count;
    }

    // Sum distribution by box convolution with prefix sums: counts[s] after
    // step i is the number of i-tuples summing to s.
    const std::uint64_t chunk_max = (1ull << prob.k) - 1;
    const std::uint64_t max_sum = chunk_max * static_cast<std::uint64_t>(prob.n);
    std::vector<BigInt> counts(max_sum + 1, 0);
    counts[0] = 1;
    std::uint64_t reach = 0;
    for (int step = 0; step < prob.n; ++step) {
        reach += chunk_max;
        std::vector<BigInt> prefix(reach + 2, 0);
        for (std::uint64_t s = 0; s <= reach; ++s) {
            prefix[s + 1] = prefix[s] + (s < counts.size() ? counts[s] : 0);
        }
        std::vector<BigInt> next(max_sum + 1, 0);
        for (std::uint64_t s = 0; s <= reach; ++s) {
            std::uint64_t from = s > chunk_max ? s - chunk_max : 0;
            next[s] = prefix[s + 1] - prefix[from];
        }
        counts = std::move(next);
    }

    std::uint64_t lo = 0;
    if (prob.q_lo > 0.0) {
        if (prob.q_lo > static_cast<double>(max_sum)) return 0;
        lo = static_cast<std::uint64_t>(std::ceil(prob.q_lo));
    }
    std::uint64_t hi = max_sum;
    if (prob.q_hi < static_cast<double>(max_sum)) {
        if (prob.q_hi < 0.0) return 0;
        hi = static_cast<std::uint64_t>(std::floor(prob.q_hi));
    }
    BigInt total = 0;
    for (std::uint64_t s = lo; s <= hi; ++s) total += counts[s];
    return total;
}

// ---------------------------------------------------------------------------
// Regression
// ---------------------------------------------------------------------------

double regression_loss(const RegressionInstance& inst, const std::vector<double>& alpha) {
    if (alpha.size() != static_cast<std::size_t>(inst.dim)) {
        throw Error(Errc::dimension, "alpha has dimension " + std::to_string(alpha.size()) +
                                         ", dataset expects " + std::to_string(inst.dim));
    }
    if (inst.xs.empty()) {
        throw Error(Errc::invalid_proposal, "regression dataset is empty");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < inst.xs.size(); ++i) {
        double dot = 0.0;
        for (int j = 0; j < inst.dim; ++j) dot += inst.xs[i][j] * alpha[j];
        double r = dot - inst.ys[i];
        total += r * r;
    }
    return total / static_cast<double>(inst.xs.size());
}

std::vector<double> regression_alpha_from_hash(const RegressionInstance& inst,
                                               const Digest256& h) {
    auto chunks = multivariate_split(h, inst.dim, inst.chunk_bits);
    std::vector<double> alpha(inst.dim);
    double half = static_cast<double>(1ull << (inst.chunk_bits - 1));
    for (int j = 0; j < inst.dim; ++j) {
        alpha[j] = chunks[j].convert_to<double>() / half - 1.0;
    }
    return alpha;
}

bool regression_check(const RegressionInstance& inst, const Digest256& h) {
    return regression_loss(inst, regression_alpha_from_hash(inst, h)) < inst.loss_threshold;
}

namespace {

std::uint64_t regression_grid_count(const RegressionInstance& inst) {
    int total_bits = inst.dim * inst.chunk_bits;
    std::uint64_t grid = 1ull << total_bits;
    double half = static_cast<double>(1ull << (inst.chunk_bits - 1));
    std::uint64_t mask = (1ull << inst.chunk_bits) - 1;
    std::vector<double> alpha(inst.dim);
    std::uint64_t hits = 0;
    for (std::uint64_t g = 0; g < grid; ++g) {
        std::uint64_t v = g;
        for (int j = 0; j < inst.dim; ++j) {
            alpha[j] = static_cast<double>(v & mask) / half - 1.0;
            v >>= inst.chunk_bits;
        }
        if (regression_loss(inst, alpha) < inst.loss_threshold) ++hits;
    }
    return hits;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sector search
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<std::uint64_t> sector_needles(const SectorProblem& prob) {
    std::uint64_t mask = prob.k >= 64 ? ~0ull : (1ull << prob.k) - 1;
    std::set<std::uint64_t> needles;
    for (std::uint64_t i = 0; i < prob.needle_count; ++i) {
        needles.insert(splitmix64(prob.needle_seed + i) & mask);
    }
    return {needles.begin(), needles.end()};
}

bool sector_check(const SectorProblem& prob, const Digest256& h) {
    BigInt sector = le_scalar(h) & ((BigInt(1) << prob.k) - 1);
    auto needles = sector_needles(prob);
    return std::binary_search(needles.begin(), needles.end(),
                              sector.convert_to<std::uint64_t>());
}

// ---------------------------------------------------------------------------
// ProblemType adapters
// ---------------------------------------------------------------------------

namespace {

double probability_to_bits(double probability) {
    if (probability <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log2(probability);
}

class UnivariateType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kUnivariateTag; }
    std::string name() const override { return "univariate"; }

    void validate_proposal(const ProblemProposal& p) const override {
        UnivariateProblem prob = decode_univariate(as_span(p.public_params));
        if (prob.fn != UnivariateFn::identity_u32 && prob.fn != UnivariateFn::float_u32 &&
            prob.fn != UnivariateFn::poly_u32) {
            bad_params("unknown univariate function tag");
        }
        if (prob.fn == UnivariateFn::poly_u32) {
            for (int i = 1; i < 4; ++i) {
                if (!(prob.poly_coeffs[i] >= 0.0)) {
                    bad_params("poly_u32 requires nonnegative c1..c3");
                }
            }
        }
        if (!std::isfinite(prob.y_regular)) bad_params("regular target must be finite");
        if (prob.y_bonus && *prob.y_bonus > prob.y_regular) {
            throw Error(Errc::config, "bonus target must not be easier than the regular target");
        }
    }

    double difficulty(const ProblemProposal& p) const override {
        UnivariateProblem prob = decode_univariate(as_span(p.public_params));
        std::uint64_t count = univariate_count_below(prob, prob.y_regular);
        return probability_to_bits(static_cast<double>(count) /
                                   static_cast<double>(kU32Space));
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        UnivariateProblem prob = decode_univariate(as_span(p.public_params));
        SolveGrade grade = univariate_check(prob, h);
        return {grade != SolveGrade::unsolved, grade == SolveGrade::solved_with_bonus};
    }

    std::uint64_t bonus_fee(const ProblemProposal& p) const override {
        return decode_univariate(as_span(p.public_params)).bonus_fee;
    }
};

class MultivariateType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kMultivariateTag; }
    std::string name() const override { return "multivariate"; }

    void validate_proposal(const ProblemProposal& p) const override {
        MultivariateProblem prob = decode_multivariate(as_span(p.public_params));
        if (prob.fn != MultivariateFn::sum_chunks && prob.fn != MultivariateFn::parity) {
            bad_params("unknown multivariate function tag");
        }
        if (prob.n < 1 || prob.k < 1 || prob.n * prob.k > 256) {
            bad_params("multivariate requires n >= 1, k >= 1, n*k <= 256");
        }
        if (prob.fn == MultivariateFn::sum_chunks && prob.k > 12) {
            bad_params("sum_chunks instances are limited to k <= 12 so the exact count stays "
                       "tractable");
        }
        if (std::isnan(prob.q_lo) || std::isnan(prob.q_hi) || prob.q_lo > prob.q_hi) {
            bad_params("acceptance interval is empty or malformed");
        }
    }

    double difficulty(const ProblemProposal& p) const override {
        MultivariateProblem prob = decode_multivariate(as_span(p.public_params));
        BigInt count = multivariate_count_in_q(prob);
        if (count == 0) return std::numeric_limits<double>::infinity();
        BigInt space = BigInt(1) << (prob.n * prob.k);
        using Float = boost::multiprecision::cpp_bin_float_50;
        Float bits = -log(Float(count) / Float(space)) / log(Float(2));
        double out = bits.convert_to<double>();
        return out == 0.0 ? 0.0 : out;
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        MultivariateProblem prob = decode_multivariate(as_span(p.public_params));
        return {multivariate_check(prob, h), false};
    }
};

class RegressionType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kRegressionTag; }
    std::string name() const override { return "regression"; }

    void validate_proposal(const ProblemProposal& p) const override {
        RegressionInstance inst = decode_regression(as_span(p.public_params));
        if (inst.dim < 1 || inst.chunk_bits < 1) bad_params("regression needs dim, k >= 1");
        if (inst.dim * inst.chunk_bits > 20) {
            bad_params("regression instances are limited to dim*k <= 20 so the exact count "
                       "stays tractable");
        }
        if (inst.xs.empty()) bad_params("regression dataset is empty");
        if (!(inst.loss_threshold > 0.0)) bad_params("loss threshold must be positive");
        for (const auto& row : inst.xs) {
            if (row.size() != static_cast<std::size_t>(inst.dim)) {
                throw Error(Errc::dimension, "dataset row dimension mismatch");
            }
        }
    }

    double difficulty(const ProblemProposal& p) const override {
        RegressionInstance inst = decode_regression(as_span(p.public_params));
        std::uint64_t hits = regression_grid_count(inst);
        std::uint64_t grid = 1ull << (inst.dim * inst.chunk_bits);
        return probability_to_bits(static_cast<double>(hits) / static_cast<double>(grid));
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        RegressionInstance inst = decode_regression(as_span(p.public_params));
        return {regression_check(inst, h), false};
    }
};

class SectorType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kSectorTag; }
    std::string name() const override { return "sector-search"; }

    void validate_proposal(const ProblemProposal& p) const override {
        SectorProblem prob = decode_sector(as_span(p.public_params));
        if (prob.k < 1 || prob.k > 32) bad_params("sector search requires 1 <= k <= 32");
        if (prob.needle_count < 1) bad_params("needle count must be positive");
        if (prob.needle_count > (1ull << prob.k)) {
            bad_params("needle count exceeds the sector space");
        }
    }

    double difficulty(const ProblemProposal& p) const override {
        SectorProblem prob = decode_sector(as_span(p.public_params));
        std::uint64_t distinct = sector_needles(prob).size();
        double space = std::ldexp(1.0, prob.k);
        return probability_to_bits(static_cast<double>(distinct) / space);
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        SectorProblem prob = decode_sector(as_span(p.public_params));
        return {sector_check(prob, h), false};
    }
};

}  // namespace

std::shared_ptr<const ProblemType> make_univariate_type() {
    return std::make_shared<UnivariateType>();
}
std::shared_ptr<const ProblemType> make_multivariate_type() {
    return std::make_shared<MultivariateType>();
}
std::shared_ptr<const ProblemType> make_regression_type() {
    return std::make_shared<RegressionType>();
}
std::shared_ptr<const ProblemType> make_sector_type() {
    return std::make_shared<SectorType>();
}

}  // namespace pupow::funcprob
