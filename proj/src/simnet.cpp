#include "pupow/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pupow/engine.hpp"
#include "pupow/funcprob.hpp"
#include "pupow/regexdiff.hpp"
#include "pupow/registry.hpp"
#include "pupow/splitkey_dsa.hpp"
#include "pupow/splitkey_ed.hpp"

namespace pupow::sim {

namespace {

constexpr std::uint64_t kEpoch = 1000000000;

// Hand-rolled draws keep runs reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exp_gap(double rate) {
        double u = uniform01();
        if (u >= 1.0) u = std::nextafter(1.0, 0.0);
        return -std::log1p(-u) / rate;
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }

    std::size_t weighted(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double x = uniform01() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            x -= weights[i];
            if (x <= 0) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace

AccountId account_from_name(const std::string& name) {
    Digest256 d = hash256("account:" + name);
    AccountId a;
    std::copy(d.bytes.begin(), d.bytes.end(), a.begin());
    return a;
}

// ---------------------------------------------------------------------------
// Difficulty-targeted pattern generation
// ---------------------------------------------------------------------------

namespace {

std::string class_token(int start, int size) {
    if (size == 1) {
        return std::string(1, regexdiff::index_symbol(start));
    }
    std::string token = "[";
    token += regexdiff::index_symbol(start);
    token += '-';
    token += regexdiff::index_symbol(start + size - 1);
    token += ']';
    return token;
}

std::string build_pattern(int length, double target_bits, int free_prefix, Rng& rng) {
    std::string body;
    int used = 0;
    double remaining = target_bits;
    if (free_prefix > 0) {
        body += "([a-z2-7]{" + std::to_string(free_prefix) + "})";
        used += free_prefix;
    }
    while (remaining > 0.04 && used < length) {
        if (remaining >= 5.0) {
            int sym = static_cast<int>(rng.below(32));
            body += class_token(sym, 1);
            remaining -= 5.0;
        } else {
            int size = std::clamp(
                static_cast<int>(std::lround(32.0 * std::exp2(-remaining))), 1, 31);
            int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(33 - size)));
            body += class_token(start, size);
            remaining -= 5.0 - std::log2(static_cast<double>(size));
        }
        ++used;
    }
    if (used < length) {
        body += "([a-z2-7]{" + std::to_string(length - used) + "})";
    }
    return "^" + body + "$";
}

}  // namespace

std::string pattern_for_difficulty(int length, double target_bits, double min_bits,
                                   double max_bits, std::uint64_t rng_seed, int free_prefix) {
    if (target_bits < 0 || target_bits > 5.0 * (length - free_prefix)) {
        throw Error(Errc::range, "target difficulty is unreachable at this length");
    }
    Rng rng(rng_seed);
    for (int attempt = 0; attempt < 32; ++attempt) {
        double jitter = attempt == 0 ? 0.0 : rng.uniform(-0.02, 0.02);
        std::string pattern =
            build_pattern(length, std::clamp(target_bits + jitter, min_bits, max_bits),
                          free_prefix, rng);
        auto dfa = regexdiff::compile_cached(pattern);
        double bits = regexdiff::difficulty_bits(*dfa, length);
        if (bits >= min_bits && bits <= max_bits) {
            return pattern;
        }
    }
    throw Error(Errc::internal, "could not hit the requested difficulty window");
}

// ---------------------------------------------------------------------------
// Config codecs
// ---------------------------------------------------------------------------

SimConfig config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.seed = j.value("seed", c.seed);
    c.scenario = j.value("scenario", c.scenario);
    if (c.scenario != "decentralized" && c.scenario != "centralized") {
        throw Error(Errc::config, "scenario must be 'decentralized' or 'centralized'");
    }
    c.total_blocks = j.value("total_blocks", c.total_blocks);
    c.target_interval = j.value("target_interval", c.target_interval);
    c.block_reward = j.value("block_reward", c.block_reward);
    if (j.contains("range_bits")) {
        c.range_min_bits = j["range_bits"].at(0).get<double>();
        c.range_max_bits = j["range_bits"].at(1).get<double>();
    }
    c.retarget_window = j.value("retarget_window", c.retarget_window);
    c.fallback_extra_bits = j.value("fallback_extra_bits", c.fallback_extra_bits);
    c.propagation_delay = j.value("propagation_delay", c.propagation_delay);
    if (j.contains("power_step")) {
        c.power_step = PowerStep{j["power_step"].at("height").get<std::uint64_t>(),
                                 j["power_step"].at("factor").get<double>()};
    }
    if (j.contains("halt_proposals_at_height")) {
        c.halt_proposals_at_height = j["halt_proposals_at_height"].get<std::uint64_t>();
    }
    for (const auto& jm : j.value("miners", nlohmann::json::array())) {
        MinerConfig m;
        m.name = jm.at("name").get<std::string>();
        m.hash_power = jm.at("hash_power").get<double>();
        if (jm.contains("solvable")) {
            m.solvable.clear();
            for (const auto& tag : jm["solvable"]) m.solvable.insert(tag.get<std::uint16_t>());
        }
        c.miners.push_back(std::move(m));
    }
    for (const auto& jp : j.value("puzzlers", nlohmann::json::array())) {
        PuzzlerConfig p;
        p.name = jp.at("name").get<std::string>();
        p.rate = jp.value("rate", p.rate);
        p.fee = jp.value("fee", p.fee);
        p.fee_jitter = jp.value("fee_jitter", p.fee_jitter);
        if (jp.contains("types")) {
            p.types.clear();
            for (const auto& t : jp["types"]) {
                p.types.emplace_back(t.at("tag").get<std::uint16_t>(),
                                     t.value("weight", 1.0));
            }
        }
        c.puzzlers.push_back(std::move(p));
    }
    return c;
}

nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["scenario"] = c.scenario;
    j["total_blocks"] = c.total_blocks;
    j["target_interval"] = c.target_interval;
    j["block_reward"] = c.block_reward;
    j["range_bits"] = {c.range_min_bits, c.range_max_bits};
    j["retarget_window"] = c.retarget_window;
    j["fallback_extra_bits"] = c.fallback_extra_bits;
    j["propagation_delay"] = c.propagation_delay;
    if (c.power_step) {
        j["power_step"] = {{"height", c.power_step->height}, {"factor", c.power_step->factor}};
    }
    if (c.halt_proposals_at_height) {
        j["halt_proposals_at_height"] = *c.halt_proposals_at_height;
    }
    j["miners"] = nlohmann::json::array();
    for (const auto& m : c.miners) {
        nlohmann::json jm{{"name", m.name}, {"hash_power", m.hash_power}};
        jm["solvable"] = m.solvable;
        j["miners"].push_back(std::move(jm));
    }
    j["puzzlers"] = nlohmann::json::array();
    for (const auto& p : c.puzzlers) {
        nlohmann::json jp{{"name", p.name}, {"rate", p.rate}, {"fee", p.fee},
                          {"fee_jitter", p.fee_jitter}};
        jp["types"] = nlohmann::json::array();
        for (const auto& [tag, weight] : p.types) {
            jp["types"].push_back({{"tag", tag}, {"weight", weight}});
        }
        j["puzzlers"].push_back(std::move(jp));
    }
    return j;
}

// ---------------------------------------------------------------------------
// The event-driven simulator
// ---------------------------------------------------------------------------

namespace {

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    int kind = 0;  // 0 = miner attempt, 1 = puzzler proposal
    std::size_t actor = 0;

    bool operator>(const Event& other) const {
        return std::tie(time, seq) > std::tie(other.time, other.seq);
    }
};

struct MinerState {
    MinerConfig cfg;
    AccountId account{};
    Block tmpl;
    bool tmpl_valid = false;
    std::uint64_t chain_seen = 0;  // chain version the template was built on
    double stale_at = 0.0;         // when the miner learns about the latest block
};

struct PuzzlerState {
    PuzzlerConfig cfg;
    AccountId account{};
    bool halted = false;
};

struct RuntimeInfo {
    double solve_time = 0.0;
    std::uint64_t attempts = 0;
    std::string miner;
    DifficultyRange range_after;
};

class Simulation {
public:
    Simulation(const SimConfig& config, std::string store_path)
        : config_(config),
          store_path_(std::move(store_path)),
          registry_(make_default_registry()),
          rng_(config.seed),
          chain_(make_params(config)) {
        if (config_.miners.empty()) {
            throw Error(Errc::config, "at least one miner is required");
        }
        for (const auto& m : config_.miners) {
            if (m.hash_power <= 0) {
                throw Error(Errc::config, "hash powers must be positive");
            }
        }
        if (config_.total_blocks < 1) {
            throw Error(Errc::config, "total_blocks must be at least 1");
        }
        if (config_.scenario == "centralized") {
            if (config_.puzzlers.size() > 1) {
                throw Error(Errc::config,
                            "the centralized scenario has a single problem setter");
            }
            for (const auto& p : config_.puzzlers) {
                if (p.fee != 0 || p.fee_jitter != 0) {
                    throw Error(Errc::config,
                                "the problem setter's proposals carry zero fee");
                }
            }
        }
        for (const auto& m : config_.miners) {
            MinerState ms;
            ms.cfg = m;
            ms.account = account_from_name(m.name);
            miners_.push_back(std::move(ms));
        }
        for (const auto& p : config_.puzzlers) {
            PuzzlerState ps;
            ps.cfg = p;
            ps.account = account_from_name(p.name);
            puzzlers_.push_back(std::move(ps));
        }
    }

    SimReport run() {
        for (std::size_t i = 0; i < miners_.size(); ++i) {
            push_event(rng_.exp_gap(attempt_rate(i)), 0, i);
        }
        for (std::size_t i = 0; i < puzzlers_.size(); ++i) {
            push_event(rng_.exp_gap(puzzlers_[i].cfg.rate), 1, i);
        }

        while (chain_.height() < config_.total_blocks && !events_.empty()) {
            Event ev = events_.top();
            events_.pop();
            now_ = ev.time;
            if (ev.kind == 0) {
                miner_attempt(ev.actor);
            } else {
                puzzler_propose(ev.actor);
            }
        }
        return finalize();
    }

private:
    static ProtocolParams make_params(const SimConfig& c) {
        ProtocolParams p;
        p.block_reward = c.block_reward;
        p.retarget_window = c.retarget_window;
        p.target_interval_seconds =
            static_cast<std::uint64_t>(std::llround(c.target_interval));
        p.fallback_extra_millibits = to_millibits(c.fallback_extra_bits);
        p.initial_range = DifficultyRange{to_millibits(c.range_min_bits),
                                          to_millibits(c.range_max_bits)};
        if (p.initial_range.min_millibits < 1000 ||
            p.initial_range.min_millibits > p.initial_range.max_millibits) {
            throw Error(Errc::config, "difficulty range must satisfy 1 <= min <= max bits");
        }
        return p;
    }

    void push_event(double time, int kind, std::size_t actor) {
        events_.push(Event{time, seq_++, kind, actor});
    }

    double attempt_rate(std::size_t miner) const {
        double rate = miners_[miner].cfg.hash_power;
        if (config_.power_step && chain_.height() >= config_.power_step->height) {
            rate *= config_.power_step->factor;
        }
        return rate;
    }

    bool announcable(const ProblemProposal& p) const {
        if (!chain_.difficulty_range().contains(p.proposed_difficulty_millibits)) return false;
        if (chain_.problem_mempool().count(proposal_hash(p))) return false;
        const ProblemType* type = registry_.find(p.problem_type);
        if (!type) return false;
        return chain_.ledger().balance(p.proposer) >= p.fee + type->bonus_fee(p);
    }

    void rebuild_template(MinerState& m) {
        // Drop pending proposals that went stale with the difficulty range.
        std::erase_if(pending_, [&](const ProblemProposal& p) {
            return !chain_.difficulty_range().contains(p.proposed_difficulty_millibits);
        });

        MinerCapabilities caps{m.cfg.solvable, m.cfg.hash_power};
        auto solved = select_problem(chain_.problem_mempool(), caps, chain_.difficulty_range(),
                                     chain_.ledger(), registry_);
        std::vector<ProblemProposal> announce;
        for (const auto& p : pending_) {
            if (announcable(p)) announce.push_back(p);
        }
        m.tmpl = build_template(chain_, m.account, std::move(solved), {}, std::move(announce),
                                kEpoch + static_cast<std::uint64_t>(now_));
        m.tmpl_valid = true;
        m.chain_seen = chain_version_;
    }

    void miner_attempt(std::size_t idx) {
        MinerState& m = miners_[idx];
        bool sees_latest = now_ >= m.stale_at;
        if (!m.tmpl_valid || (sees_latest && m.chain_seen != chain_version_)) {
            if (sees_latest) {
                rebuild_template(m);
            } else if (!m.tmpl_valid) {
                rebuild_template(m);  // first template
            }
        }

        m.tmpl.header.timestamp = kEpoch + static_cast<std::uint64_t>(now_);
        m.tmpl.header.nonce = nonce_counter_++;
        Digest256 h = header_hash(m.tmpl.header);
        ++attempts_since_block_;

        if (check_solution(h, m.tmpl, registry_).solved) {
            found_block(m.tmpl, idx);
        }
        push_event(now_ + rng_.exp_gap(attempt_rate(idx)), 0, idx);
    }

    void found_block(const Block& block, std::size_t miner_idx) {
        SubmitResult result = chain_.submit_block(block, registry_);
        if (result.status == SubmitStatus::rejected) {
            throw Error(Errc::internal,
                        "simulated block failed validation: " + result.report.first_failure());
        }
        if (result.status != SubmitStatus::applied) {
            return;
        }
        Digest256 hash = header_hash(block.header);
        runtime_[hash] = RuntimeInfo{now_, attempts_since_block_,
                                     miners_[miner_idx].cfg.name, chain_.difficulty_range()};
        attempts_since_block_ = 0;

        // Announced proposals leave the pending pool; solved ones can't be
        // pending (they were announced earlier).
        for (const auto& p : block.new_problems) {
            Digest256 ph = proposal_hash(p);
            std::erase_if(pending_,
                          [&](const ProblemProposal& q) { return proposal_hash(q) == ph; });
        }

        ++chain_version_;
        for (std::size_t i = 0; i < miners_.size(); ++i) {
            MinerState& other = miners_[i];
            other.tmpl_valid = (i == miner_idx) ? false : other.tmpl_valid;
            double learn_at = (i == miner_idx) ? now_ : now_ + config_.propagation_delay;
            if (i == miner_idx || config_.propagation_delay == 0.0) {
                other.tmpl_valid = false;
                other.stale_at = now_;
            } else {
                other.stale_at = std::max(other.stale_at, learn_at);
            }
        }
    }

    void puzzler_propose(std::size_t idx) {
        PuzzlerState& p = puzzlers_[idx];
        if (config_.halt_proposals_at_height &&
            chain_.height() >= *config_.halt_proposals_at_height) {
            p.halted = true;
        }
        if (!p.halted) {
            try {
                make_proposal(p);
            } catch (const Error&) {
                ++skipped_proposals_;
            }
            push_event(now_ + rng_.exp_gap(p.cfg.rate), 1, idx);
        }
    }

    void make_proposal(PuzzlerState& p) {
        std::vector<double> weights;
        for (const auto& [tag, w] : p.cfg.types) weights.push_back(w);
        std::uint16_t tag = p.cfg.types[rng_.weighted(weights)].first;

        const DifficultyRange& range = chain_.difficulty_range();
        double margin = std::min(0.15, (range.max_bits() - range.min_bits()) / 4.0);
        double target = rng_.uniform(range.min_bits() + margin, range.max_bits() - margin);

        ProposalSpec spec;
        spec.problem_type = tag;
        spec.fee = p.cfg.fee + (p.cfg.fee_jitter ? rng_.below(p.cfg.fee_jitter + 1) : 0);
        spec.timestamp = kEpoch + static_cast<std::uint64_t>(now_);
        spec.proposer = p.account;
        spec.proposer_secret = Bytes(p.account.begin(), p.account.end());

        switch (tag) {
            case funcprob::kUnivariateTag: {
                funcprob::UnivariateProblem prob;
                prob.fn = funcprob::UnivariateFn::identity_u32;
                prob.y_regular = std::exp2(32.0 - target);
                spec.public_params = funcprob::encode_params(prob);
                break;
            }
            case funcprob::kSectorTag: {
                funcprob::SectorProblem prob;
                prob.k = 24;
                prob.needle_seed = rng_.bits();
                prob.needle_count = std::max<std::uint64_t>(
                    1, static_cast<std::uint64_t>(std::llround(std::exp2(24.0 - target))));
                spec.public_params = funcprob::encode_params(prob);
                break;
            }
            case dsa::kVanityDsaTag: {
                dsa::Params params = dsa::realistic_params();
                BigInt x0 = 1 + (le_scalar(sample_digest(rng_.bits(), 0)) % (params.q - 1));
                dsa::KeyHalf half = dsa::puzzler_setup(params, x0);
                spec.public_params = dsa::encode_vanity_params(params, half.y0);
                spec.target_regex =
                    pattern_for_difficulty(params.text_length(), target, range.min_bits(),
                                           range.max_bits(), rng_.bits(), /*free_prefix=*/2);
                break;
            }
            case ed::kVanityEdTag: {
                Digest256 seed = sample_digest(rng_.bits(), 1);
                ed::PrunedScalarHalf half = ed::seed_expand_prune(as_span(seed));
                ed::Point a0 = ed::scalar_mul_base(half.s0);
                auto enc = ed::encode_point(a0);
                spec.public_params = Bytes(enc.begin(), enc.end());
                spec.target_regex = pattern_for_difficulty(
                    56, target, range.min_bits(), range.max_bits(), rng_.bits());
                break;
            }
            default:
                throw Error(Errc::config, "the simulator cannot generate instances of type " +
                                              std::to_string(tag));
        }

        ProblemProposal proposal = propose(spec, range, registry_,
                                           chain_.ledger().balance(p.account));
        Digest256 hash = proposal_hash(proposal);
        if (chain_.problem_mempool().count(hash)) return;
        for (const auto& q : pending_) {
            if (proposal_hash(q) == hash) return;
        }
        pending_.push_back(std::move(proposal));
    }

    SimReport finalize() {
        SimReport report;
        report.skipped_proposals = skipped_proposals_;

        std::unordered_map<std::string, std::size_t> miner_index;
        for (std::size_t i = 0; i < miners_.size(); ++i) {
            report.miner_names.push_back(miners_[i].cfg.name);
            miner_index[to_hex(ByteSpan(miners_[i].account.data(), 32))] = i;
        }
        report.miner_blocks.assign(miners_.size(), 0);

        std::unordered_set<Digest256> solved_seen;
        report.no_reuse_ok = true;
        double prev_time = 0.0;
        double interval_sum = 0.0;
        std::uint64_t attempts_sum = 0;

        auto blocks = chain_.active_blocks();
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const Block& b = *blocks[i];
            Digest256 hash = header_hash(b.header);
            const RuntimeInfo& info = runtime_.at(hash);

            BlockRecord rec;
            rec.height = i + 1;
            rec.miner = info.miner;
            rec.problem_type = b.is_fallback() ? kFallbackTag : b.solved_problem->problem_type;
            rec.difficulty_millibits = b.header.difficulty_millibits;
            rec.solve_time = info.solve_time;
            rec.interval = info.solve_time - prev_time;
            rec.attempts = info.attempts;
            rec.fee = b.is_fallback() ? 0 : b.solved_problem->fee;
            rec.range_after = info.range_after;
            prev_time = info.solve_time;

            auto it = miner_index.find(to_hex(ByteSpan(b.transactions.front().to.data(), 32)));
            if (it != miner_index.end()) {
                ++report.miner_blocks[it->second];
            }
            ++report.solved_by_type[rec.problem_type];
            if (b.is_fallback()) {
                ++report.fallback_blocks;
            } else {
                Digest256 ph = proposal_hash(*b.solved_problem);
                if (!solved_seen.insert(ph).second) {
                    report.no_reuse_ok = false;
                }
                report.fees_paid += b.solved_problem->fee;
            }
            interval_sum += rec.interval;
            attempts_sum += rec.attempts;
            report.blocks.push_back(std::move(rec));
        }

        report.total_blocks = blocks.size();
        for (std::size_t i = 0; i < miners_.size(); ++i) {
            report.miner_shares.push_back(
                report.total_blocks
                    ? static_cast<double>(report.miner_blocks[i]) / report.total_blocks
                    : 0.0);
        }
        report.mean_interval = report.total_blocks ? interval_sum / report.total_blocks : 0.0;
        report.mean_attempts =
            report.total_blocks ? static_cast<double>(attempts_sum) / report.total_blocks : 0.0;
        report.tip_hash = to_hex(as_span(chain_.tip()));
        report.conservation_ok =
            chain_.ledger().total_supply() == chain_.height() * config_.block_reward;
        for (const auto& [account, balance] : chain_.ledger().balances) {
            report.final_balances[to_hex(ByteSpan(account.data(), 32))] = balance;
        }

        if (!store_path_.empty()) {
            store_create(store_path_, chain_.params());
            for (const Block* b : blocks) {
                store_append(*b, store_path_);
            }
        }
        return report;
    }

    SimConfig config_;
    std::string store_path_;
    ProblemRegistry registry_;
    Rng rng_;
    ChainState chain_;
    std::vector<MinerState> miners_;
    std::vector<PuzzlerState> puzzlers_;
    std::vector<ProblemProposal> pending_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::unordered_map<Digest256, RuntimeInfo> runtime_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    std::uint64_t nonce_counter_ = 0;
    std::uint64_t chain_version_ = 0;
    std::uint64_t attempts_since_block_ = 0;
    std::uint64_t skipped_proposals_ = 0;
};

}  // namespace

SimReport run(const SimConfig& config, const std::string& store_path) {
    return Simulation(config, store_path).run();
}

SimReport attack_scenario_dos(SimConfig config, std::uint64_t halt_height,
                              const std::string& store_path) {
    if (config.scenario != "centralized") {
        throw Error(Errc::config, "the DoS scenario models the centralized problem setter");
    }
    config.halt_proposals_at_height = halt_height;
    return run(config, store_path);
}

// ---------------------------------------------------------------------------
// Report output
// ---------------------------------------------------------------------------

nlohmann::json report_to_json(const SimReport& r) {
    nlohmann::json j;
    j["total_blocks"] = r.total_blocks;
    j["fallback_blocks"] = r.fallback_blocks;
    j["miners"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.miner_names.size(); ++i) {
        j["miners"].push_back({{"name", r.miner_names[i]},
                               {"blocks", r.miner_blocks[i]},
                               {"share", r.miner_shares[i]}});
    }
    j["solved_by_type"] = nlohmann::json::object();
    for (const auto& [tag, count] : r.solved_by_type) {
        j["solved_by_type"][std::to_string(tag)] = count;
    }
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : r.blocks) {
        j["blocks"].push_back({{"height", b.height},
                               {"miner", b.miner},
                               {"problem_type", b.problem_type},
                               {"difficulty_millibits", b.difficulty_millibits},
                               {"solve_time", b.solve_time},
                               {"interval", b.interval},
                               {"attempts", b.attempts},
                               {"fee", b.fee},
                               {"range_after_millibits",
                                {b.range_after.min_millibits, b.range_after.max_millibits}}});
    }
    j["mean_interval"] = r.mean_interval;
    j["mean_attempts"] = r.mean_attempts;
    j["fees_paid"] = r.fees_paid;
    j["skipped_proposals"] = r.skipped_proposals;
    j["tip_hash"] = r.tip_hash;
    j["final_balances"] = r.final_balances;
    j["conservation_ok"] = r.conservation_ok;
    j["no_reuse_ok"] = r.no_reuse_ok;
    return j;
}

std::string report_summary(const SimReport& r) {
    std::ostringstream out;
    out << "blocks: " << r.total_blocks << "  fallback: " << r.fallback_blocks
        << "  mean interval: " << r.mean_interval << "s  mean attempts: " << r.mean_attempts
        << "\n";
    out << "miner            blocks   share\n";
    for (std::size_t i = 0; i < r.miner_names.size(); ++i) {
        out << "  " << r.miner_names[i];
        for (std::size_t pad = r.miner_names[i].size(); pad < 15; ++pad) out << ' ';
        out << r.miner_blocks[i] << "      " << r.miner_shares[i] << "\n";
    }
    out << "solved by type:";
    for (const auto& [tag, count] : r.solved_by_type) {
        out << "  [" << tag << "] " << count;
    }
    out << "\nfees paid: " << r.fees_paid << "  conservation: "
        << (r.conservation_ok ? "ok" : "VIOLATED")
        << "  reuse: " << (r.no_reuse_ok ? "none" : "DETECTED") << "\n";
    out << "tip: " << r.tip_hash << "\n";
    return out.str();
}

}  // namespace pupow::sim
