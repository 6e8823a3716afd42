#include "pupow/chain.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pupow/engine.hpp"
#include "pupow/problem.hpp"

namespace pupow {

// ---------------------------------------------------------------------------
// Canonical encodings
// ---------------------------------------------------------------------------

namespace {

void write_tx(ByteWriter& w, const Transaction& tx, bool with_auth = true) {
    w.account(tx.from);
    w.account(tx.to);
    w.u64(tx.amount);
    w.u64(tx.fee);
    w.u64(tx.nonce);
    if (with_auth) w.digest(tx.authenticator);
}

void write_proposal(ByteWriter& w, const ProblemProposal& p, bool with_auth = true) {
    w.u16(p.problem_type);
    w.u32(static_cast<std::uint32_t>(p.public_params.size()));
    w.raw(as_span(p.public_params));
    w.str(p.target_regex);
    w.u64(p.fee);
    w.u64(p.proposed_difficulty_millibits);
    w.u64(p.timestamp);
    w.account(p.proposer);
    if (with_auth) w.digest(p.authenticator);
}

}  // namespace

Bytes encode(const Transaction& tx) {
    ByteWriter w;
    write_tx(w, tx);
    return w.take();
}

Bytes encode(const ProblemProposal& p) {
    ByteWriter w;
    write_proposal(w, p);
    return w.take();
}

Bytes encode(const Block& b) {
    ByteWriter w;
    HeaderBytes hb = header_bytes(b.header);
    w.raw(ByteSpan(hb.data(), hb.size()));
    w.u32(static_cast<std::uint32_t>(b.transactions.size()));
    for (const auto& tx : b.transactions) write_tx(w, tx);
    w.u32(static_cast<std::uint32_t>(b.new_problems.size()));
    for (const auto& p : b.new_problems) write_proposal(w, p);
    w.u8(b.solved_problem ? 1 : 0);
    if (b.solved_problem) write_proposal(w, *b.solved_problem);
    return w.take();
}

Transaction decode_transaction(ByteReader& r) {
    Transaction tx;
    tx.from = r.account();
    tx.to = r.account();
    tx.amount = r.u64();
    tx.fee = r.u64();
    tx.nonce = r.u64();
    tx.authenticator = r.digest();
    return tx;
}

ProblemProposal decode_proposal(ByteReader& r) {
    ProblemProposal p;
    p.problem_type = r.u16();
    std::uint32_t n = r.u32();
    p.public_params = r.raw(n);
    p.target_regex = r.str();
    p.fee = r.u64();
    p.proposed_difficulty_millibits = r.u64();
    p.timestamp = r.u64();
    p.proposer = r.account();
    p.authenticator = r.digest();
    return p;
}

Block decode_block(ByteSpan data) {
    ByteReader r(data);
    Block b;
    Bytes hb = r.raw(kHeaderSize);
    b.header = header_decode(as_span(hb));
    std::uint32_t txn = r.u32();
    b.transactions.reserve(txn);
    for (std::uint32_t i = 0; i < txn; ++i) b.transactions.push_back(decode_transaction(r));
    std::uint32_t pn = r.u32();
    b.new_problems.reserve(pn);
    for (std::uint32_t i = 0; i < pn; ++i) b.new_problems.push_back(decode_proposal(r));
    if (r.u8() != 0) b.solved_problem = decode_proposal(r);
    if (!r.done()) {
        throw Error(Errc::corrupt, "trailing bytes after block record");
    }
    return b;
}

Digest256 tx_hash(const Transaction& tx) { return hash256(as_span(encode(tx))); }

Digest256 proposal_hash(const ProblemProposal& p) { return hash256(as_span(encode(p))); }

Digest256 make_authenticator(ByteSpan secret_seed, ByteSpan message) {
    Bytes buf(secret_seed.begin(), secret_seed.end());
    buf.insert(buf.end(), message.begin(), message.end());
    return hash256(as_span(buf));
}

// ---------------------------------------------------------------------------
// Merkle tree
// ---------------------------------------------------------------------------

Digest256 merkle_root(const std::vector<Bytes>& items) {
    if (items.empty()) return Digest256{};
    std::vector<Digest256> layer;
    layer.reserve(items.size());
    for (const auto& item : items) layer.push_back(hash256(as_span(item)));
    while (layer.size() > 1) {
        std::vector<Digest256> next;
        next.reserve((layer.size() + 1) / 2);
        for (std::size_t i = 0; i < layer.size(); i += 2) {
            const Digest256& left = layer[i];
            const Digest256& right = (i + 1 < layer.size()) ? layer[i + 1] : layer[i];
            Bytes concat(left.bytes.begin(), left.bytes.end());
            concat.insert(concat.end(), right.bytes.begin(), right.bytes.end());
            next.push_back(hash256(as_span(concat)));
        }
        layer = std::move(next);
    }
    return layer.front();
}

Digest256 tx_merkle_root(const std::vector<Transaction>& txs) {
    std::vector<Bytes> items;
    items.reserve(txs.size());
    for (const auto& tx : txs) items.push_back(encode(tx));
    return merkle_root(items);
}

Digest256 problem_merkle_root(const std::vector<ProblemProposal>& problems) {
    std::vector<Bytes> items;
    items.reserve(problems.size());
    for (const auto& p : problems) items.push_back(encode(p));
    return merkle_root(items);
}

// ---------------------------------------------------------------------------
// ProblemRegistry
// ---------------------------------------------------------------------------

void ProblemRegistry::register_type(std::shared_ptr<const ProblemType> type) {
    std::uint16_t tag = type->tag();
    if (types_.count(tag)) {
        throw Error(Errc::config, "problem type tag " + std::to_string(tag) +
                                      " is already registered");
    }
    types_.emplace(tag, std::move(type));
}

const ProblemType* ProblemRegistry::find(std::uint16_t tag) const {
    auto it = types_.find(tag);
    return it == types_.end() ? nullptr : it->second.get();
}

const ProblemType& ProblemRegistry::require(std::uint16_t tag) const {
    const ProblemType* t = find(tag);
    if (!t) {
        throw Error(Errc::unknown_type, "problem type tag " + std::to_string(tag) +
                                            " is not registered");
    }
    return *t;
}

// ---------------------------------------------------------------------------
// ChainState
// ---------------------------------------------------------------------------

ChainState::ChainState(ProtocolParams params)
    : params_(params), range_(params.initial_range) {}

void ChainState::submit_transaction(const Transaction& tx) {
    if (tx.is_coinbase()) {
        throw Error(Errc::invalid_proposal, "coinbase transactions cannot be submitted");
    }
    tx_mempool_.push_back(tx);
}

const Block* ChainState::find_block(const Digest256& hash) const {
    auto it = blocks_.find(hash);
    return it == blocks_.end() ? nullptr : &it->second.block;
}

std::vector<const Block*> ChainState::active_blocks() const {
    std::vector<const Block*> out;
    out.reserve(active_.size());
    for (const auto& h : active_) out.push_back(&blocks_.at(h).block);
    return out;
}

ValidationReport ChainState::validate_against(
    const Block& block, const ProblemRegistry& registry, const Digest256& expect_parent,
    std::uint64_t new_height, const DifficultyRange& range, const Ledger& ledger,
    const std::map<Digest256, ProblemProposal>& mempool) const {
    ValidationReport report;
    auto add = [&](const std::string& name, bool pass, std::string detail = "") {
        report.checks.push_back({name, pass, std::move(detail)});
    };

    // 1. previous block
    add("prev-hash", block.header.prevhash == expect_parent,
        block.header.prevhash == expect_parent ? "" : "header does not extend the expected parent");

    // 2. difficulty of the solved problem within current bounds
    const ProblemType* type = nullptr;
    if (block.is_fallback()) {
        std::uint64_t want = range.max_millibits + params_.fallback_extra_millibits;
        if (block.header.difficulty_millibits != want) {
            add("difficulty-bounds", false,
                "fallback block difficulty " + std::to_string(block.header.difficulty_millibits) +
                    " mB, protocol requires " + std::to_string(want) + " mB");
        } else {
            add("difficulty-bounds", true);
        }
    } else {
        const ProblemProposal& p = *block.solved_problem;
        type = registry.find(p.problem_type);
        std::string why;
        if (p.problem_type == kFallbackTag) {
            why = "fallback tag cannot appear as a solved proposal";
        } else if (!type) {
            why = "unknown problem type tag " + std::to_string(p.problem_type);
        } else {
            try {
                type->validate_proposal(p);
                std::uint64_t recomputed = to_millibits(type->difficulty(p));
                if (recomputed != p.proposed_difficulty_millibits) {
                    why = "declared difficulty " +
                          std::to_string(p.proposed_difficulty_millibits) +
                          " mB does not match recomputed " + std::to_string(recomputed) + " mB";
                } else if (!range.contains(p.proposed_difficulty_millibits)) {
                    why = "difficulty " + std::to_string(p.proposed_difficulty_millibits) +
                          " mB outside range [" + std::to_string(range.min_millibits) + ", " +
                          std::to_string(range.max_millibits) + "] mB";
                } else if (block.header.difficulty_millibits != p.proposed_difficulty_millibits) {
                    why = "header difficulty does not match the solved proposal";
                } else if (!mempool.count(proposal_hash(p))) {
                    why = "solved proposal is not in the problem mempool";
                }
            } catch (const Error& e) {
                why = e.what();
            }
        }
        add("difficulty-bounds", why.empty(), why);
    }

    // 3. header hash
    Digest256 h = header_hash(block.header);
    add("header-hash", true, to_hex(as_span(h)));

    // 4. problem-specific check
    CheckResult grade;
    if (block.is_fallback()) {
        grade.solved = fallback_check_millibits(h, block.header.difficulty_millibits);
        add("problem-check", grade.solved,
            grade.solved ? "" : "header hash does not satisfy the fallback puzzle");
    } else if (!type) {
        add("problem-check", false, "unknown problem type");
    } else {
        try {
            grade = type->check(h, *block.solved_problem);
            add("problem-check", grade.solved,
                grade.solved ? "" : "header hash does not solve the proposal");
        } catch (const Error& e) {
            add("problem-check", false, e.what());
        }
    }

    // 5. commitments: merkle roots and problem hash match the block body
    {
        std::string why;
        if (block.header.tx_merkle_root != tx_merkle_root(block.transactions)) {
            why = "transaction merkle root mismatch";
        } else if (block.header.problem_merkle_root != problem_merkle_root(block.new_problems)) {
            why = "problem merkle root mismatch";
        } else {
            Digest256 want =
                block.is_fallback() ? Digest256{} : proposal_hash(*block.solved_problem);
            if (block.header.problem_hash != want) why = "problem hash mismatch";
        }
        add("commitments", why.empty(), why);
    }

    // 6. transactions and fee accounting apply cleanly
    {
        std::string why;
        Ledger scratch = ledger;
        if (block.transactions.empty() || !block.transactions.front().is_coinbase()) {
            why = "first transaction must be the coinbase";
        } else {
            std::uint64_t fee_sum = 0;
            for (std::size_t i = 1; i < block.transactions.size() && why.empty(); ++i) {
                const Transaction& tx = block.transactions[i];
                if (tx.is_coinbase()) {
                    why = "duplicate coinbase at index " + std::to_string(i);
                    break;
                }
                auto key = std::make_pair(tx.from, tx.nonce);
                if (scratch.applied_nonces.count(key)) {
                    why = "transaction nonce reuse at index " + std::to_string(i);
                    break;
                }
                std::uint64_t need = tx.amount + tx.fee;
                if (scratch.balance(tx.from) < need) {
                    why = "insufficient balance for transaction at index " + std::to_string(i);
                    break;
                }
                scratch.balances[tx.from] -= need;
                scratch.balances[tx.to] += tx.amount;
                scratch.applied_nonces.insert(key);
                fee_sum += tx.fee;
            }
            if (why.empty()) {
                const Transaction& cb = block.transactions.front();
                std::uint64_t problem_fee = block.is_fallback() ? 0 : block.solved_problem->fee;
                std::uint64_t want = params_.block_reward + fee_sum + problem_fee;
                if (cb.nonce != new_height) {
                    why = "coinbase nonce must equal the block height";
                } else if (cb.fee != 0) {
                    why = "coinbase fee must be zero";
                } else if (cb.amount != want) {
                    why = "coinbase amount " + std::to_string(cb.amount) + " != reward+fees " +
                          std::to_string(want);
                }
            }
            if (why.empty() && !block.is_fallback()) {
                const ProblemProposal& p = *block.solved_problem;
                std::uint64_t owed = p.fee + (grade.bonus && type ? type->bonus_fee(p) : 0);
                if (scratch.balance(p.proposer) < owed) {
                    why = "proposer cannot cover the problem fee";
                }
            }
            // newly announced proposals must be admissible under this context
            for (std::size_t i = 0; i < block.new_problems.size() && why.empty(); ++i) {
                const ProblemProposal& p = block.new_problems[i];
                const ProblemType* pt = registry.find(p.problem_type);
                if (p.problem_type == kFallbackTag) {
                    why = "fallback puzzle cannot be proposed (new problem " +
                          std::to_string(i) + ")";
                } else if (!pt) {
                    why = "new problem " + std::to_string(i) + " has unknown type tag " +
                          std::to_string(p.problem_type);
                } else {
                    try {
                        pt->validate_proposal(p);
                        std::uint64_t d = to_millibits(pt->difficulty(p));
                        if (d != p.proposed_difficulty_millibits) {
                            why = "new problem " + std::to_string(i) +
                                  " declares a difficulty it does not have";
                        } else if (!range.contains(d)) {
                            why = "new problem " + std::to_string(i) +
                                  " difficulty outside the current range";
                        } else if (mempool.count(proposal_hash(p))) {
                            why = "new problem " + std::to_string(i) +
                                  " is already in the problem mempool";
                        } else if (scratch.balance(p.proposer) < p.fee) {
                            why = "new problem " + std::to_string(i) +
                                  " fee exceeds the proposer balance";
                        }
                    } catch (const Error& e) {
                        why = std::string("new problem ") + std::to_string(i) + ": " + e.what();
                    }
                }
            }
        }
        add("transactions", why.empty(), why);
    }

    return report;
}

ValidationReport ChainState::validate_block(const Block& block,
                                            const ProblemRegistry& registry) const {
    if (block.header.prevhash == tip_) {
        return validate_against(block, registry, tip_, height_ + 1, range_, ledger_,
                                problem_mempool_);
    }
    if (block.header.prevhash != Digest256{} && !blocks_.count(block.header.prevhash)) {
        ValidationReport report;
        report.orphan = true;
        return report;
    }
    // Side-chain parent (possibly the genesis sentinel): rebuild the context
    // at that parent by replay.
    std::vector<Digest256> branch;
    Digest256 cur = block.header.prevhash;
    while (cur != Digest256{}) {
        branch.push_back(cur);
        cur = blocks_.at(cur).block.header.prevhash;
    }
    std::reverse(branch.begin(), branch.end());
    ChainState scratch(params_);
    for (const auto& bh : branch) {
        scratch.blocks_.emplace(bh, blocks_.at(bh));
        scratch.apply_to_tip(blocks_.at(bh).block, bh, registry);
    }
    return scratch.validate_against(block, registry, scratch.tip_, scratch.height_ + 1,
                                    scratch.range_, scratch.ledger_, scratch.problem_mempool_);
}

void ChainState::apply_to_tip(const Block& block, const Digest256& hash,
                              const ProblemRegistry& registry) {
    const std::uint64_t new_height = height_ + 1;
    const Transaction& cb = block.transactions.front();

    ledger_.balances[cb.to] += cb.amount;
    ledger_.applied_nonces.insert({cb.from, cb.nonce});
    for (std::size_t i = 1; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        ledger_.balances[tx.from] -= tx.amount + tx.fee;
        ledger_.balances[tx.to] += tx.amount;
        ledger_.applied_nonces.insert({tx.from, tx.nonce});
        std::erase_if(tx_mempool_, [&](const Transaction& m) { return m == tx; });
    }

    if (!block.is_fallback()) {
        const ProblemProposal& p = *block.solved_problem;
        std::uint64_t bonus = 0;
        if (const ProblemType* type = registry.find(p.problem_type)) {
            CheckResult grade = type->check(header_hash(block.header), p);
            if (grade.bonus) bonus = type->bonus_fee(p);
        }
        // The coinbase already mints reward + tx fees + problem fee to the
        // miner; the proposer pays the fee (and any bonus) out of pocket.
        ledger_.balances[p.proposer] -= p.fee + bonus;
        ledger_.balances[cb.to] += bonus;
        problem_mempool_.erase(proposal_hash(p));
    }
    for (const auto& p : block.new_problems) {
        problem_mempool_.emplace(proposal_hash(p), p);
    }

    tip_ = hash;
    height_ = new_height;
    active_.push_back(hash);
    maybe_retarget();
}

void ChainState::maybe_retarget() {
    const std::uint32_t window = params_.retarget_window;
    if (window < 2 || height_ == 0 || height_ % window != 0) return;
    std::vector<BlockHeader> headers;
    headers.reserve(window);
    for (std::uint64_t i = height_ - window; i < height_; ++i) {
        headers.push_back(blocks_.at(active_[i]).block.header);
    }
    DifficultyRange next = retarget(headers, range_, params_.target_interval_seconds);
    if (next != range_) {
        range_ = next;
        // Once the difficulty changes, proposals outside the new range go stale.
        std::erase_if(problem_mempool_, [&](const auto& entry) {
            return !range_.contains(entry.second.proposed_difficulty_millibits);
        });
    }
}

void ChainState::rebuild_from_branch(const std::vector<Digest256>& branch,
                                     const ProblemRegistry& registry) {
    tip_ = Digest256{};
    height_ = 0;
    range_ = params_.initial_range;
    ledger_ = Ledger{};
    problem_mempool_.clear();
    active_.clear();
    for (const auto& h : branch) {
        apply_to_tip(blocks_.at(h).block, h, registry);
    }
}

SubmitResult ChainState::submit_block(const Block& block, const ProblemRegistry& registry) {
    Digest256 hash = header_hash(block.header);
    if (blocks_.count(hash)) {
        return {SubmitStatus::duplicate, {}, false};
    }

    ValidationReport report = validate_block(block, registry);
    if (report.orphan) {
        orphans_.emplace(block.header.prevhash, block);
        return {SubmitStatus::orphaned, std::move(report), false};
    }
    if (!report.valid()) {
        return {SubmitStatus::rejected, std::move(report), false};
    }

    std::uint64_t parent_height =
        block.header.prevhash == Digest256{} ? 0 : blocks_.at(block.header.prevhash).height;
    blocks_.emplace(hash, Stored{block, parent_height + 1});

    bool reorged = false;
    if (block.header.prevhash == tip_) {
        apply_to_tip(block, hash, registry);
    } else if (parent_height + 1 > height_) {
        // First-seen tie-breaking: only a strictly longer branch displaces
        // the tip. The ledger is recomputed from genesis along the new branch.
        std::vector<Digest256> branch;
        Digest256 cur = hash;
        while (cur != Digest256{}) {
            branch.push_back(cur);
            cur = blocks_.at(cur).block.header.prevhash;
        }
        std::reverse(branch.begin(), branch.end());
        rebuild_from_branch(branch, registry);
        reorged = true;
    }

    connect_orphans(registry);
    return {SubmitStatus::applied, std::move(report), reorged};
}

void ChainState::connect_orphans(const ProblemRegistry& registry) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto it = orphans_.begin(); it != orphans_.end(); ++it) {
            if (blocks_.count(it->first)) {
                Block orphan = it->second;
                orphans_.erase(it);
                submit_block(orphan, registry);
                progress = true;
                break;
            }
        }
    }
}

ValidationReport validate_block(const Block& block, const ChainState& state,
                                const ProblemRegistry& registry) {
    return state.validate_block(block, registry);
}

SubmitResult apply_block(const Block& block, ChainState& state, const ProblemRegistry& registry) {
    return state.submit_block(block, registry);
}

// ---------------------------------------------------------------------------
// Block assembly
// ---------------------------------------------------------------------------

Block build_template(const ChainState& state, const AccountId& miner,
                     std::optional<ProblemProposal> solved, std::vector<Transaction> txs,
                     std::vector<ProblemProposal> announce, std::uint64_t timestamp) {
    Block b;
    std::uint64_t fee_sum = 0;
    for (const auto& tx : txs) fee_sum += tx.fee;
    std::uint64_t problem_fee = solved ? solved->fee : 0;

    Transaction coinbase;
    coinbase.from = kCoinbaseAccount;
    coinbase.to = miner;
    coinbase.amount = state.params().block_reward + fee_sum + problem_fee;
    coinbase.fee = 0;
    coinbase.nonce = state.height() + 1;
    b.transactions.push_back(coinbase);
    for (auto& tx : txs) b.transactions.push_back(std::move(tx));
    b.new_problems = std::move(announce);
    b.solved_problem = std::move(solved);

    b.header.version = 1;
    b.header.prevhash = state.tip();
    b.header.tx_merkle_root = tx_merkle_root(b.transactions);
    b.header.problem_merkle_root = problem_merkle_root(b.new_problems);
    b.header.problem_hash =
        b.solved_problem ? proposal_hash(*b.solved_problem) : Digest256{};
    b.header.difficulty_millibits = b.solved_problem
                                        ? b.solved_problem->proposed_difficulty_millibits
                                        : state.fallback_difficulty_millibits();
    b.header.timestamp = timestamp;
    b.header.nonce = 0;
    return b;
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

namespace {

constexpr char kGenesisMagic[8] = {'P', 'U', 'P', 'O', 'W', 'G', 'E', 'N'};

Bytes encode_genesis_record(const ProtocolParams& p) {
    ByteWriter w;
    w.raw(ByteSpan(reinterpret_cast<const std::uint8_t*>(kGenesisMagic), 8));
    w.u32(1);  // store format version
    w.u64(p.block_reward);
    w.u32(p.retarget_window);
    w.u64(p.target_interval_seconds);
    w.u64(p.fallback_extra_millibits);
    w.u64(p.initial_range.min_millibits);
    w.u64(p.initial_range.max_millibits);
    return w.take();
}

ProtocolParams decode_genesis_record(ByteSpan data) {
    ByteReader r(data);
    Bytes magic = r.raw(8);
    if (!std::equal(magic.begin(), magic.end(),
                    reinterpret_cast<const std::uint8_t*>(kGenesisMagic))) {
        throw Error(Errc::corrupt, "store does not begin with a genesis record");
    }
    std::uint32_t version = r.u32();
    if (version != 1) {
        throw Error(Errc::corrupt, "unsupported store format version " + std::to_string(version));
    }
    ProtocolParams p;
    p.block_reward = r.u64();
    p.retarget_window = r.u32();
    p.target_interval_seconds = r.u64();
    p.fallback_extra_millibits = r.u64();
    p.initial_range.min_millibits = r.u64();
    p.initial_range.max_millibits = r.u64();
    if (!r.done()) {
        throw Error(Errc::corrupt, "trailing bytes in genesis record");
    }
    return p;
}

void append_record(std::ofstream& out, const Bytes& record) {
    std::uint8_t len[4];
    for (int i = 0; i < 4; ++i) len[i] = static_cast<std::uint8_t>(record.size() >> (8 * i));
    out.write(reinterpret_cast<const char*>(len), 4);
    out.write(reinterpret_cast<const char*>(record.data()), record.size());
}

// Records in file order; index 0 is the genesis record, 1..N are blocks.
std::vector<Bytes> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open store file " + path);
    }
    std::vector<Bytes> records;
    for (std::size_t index = 0;; ++index) {
        std::uint8_t len[4];
        in.read(reinterpret_cast<char*>(len), 4);
        if (in.gcount() == 0 && in.eof()) break;
        if (in.gcount() != 4) {
            throw Error(Errc::corrupt, "store record " + std::to_string(index) +
                                           ": truncated length prefix");
        }
        std::uint32_t n = 0;
        for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(len[i]) << (8 * i);
        Bytes record(n);
        in.read(reinterpret_cast<char*>(record.data()), n);
        if (static_cast<std::uint32_t>(in.gcount()) != n) {
            throw Error(Errc::corrupt,
                        "store record " + std::to_string(index) + ": truncated body");
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

void store_create(const std::string& path, const ProtocolParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::io, "cannot create store file " + path);
    }
    append_record(out, encode_genesis_record(params));
    if (!out) {
        throw Error(Errc::io, "write to store file " + path + " failed");
    }
}

void store_append(const Block& block, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw Error(Errc::io, "cannot open store file " + path);
    }
    append_record(out, encode(block));
    if (!out) {
        throw Error(Errc::io, "write to store file " + path + " failed");
    }
}

ChainState store_load(const std::string& path, const ProblemRegistry& registry) {
    std::vector<Bytes> records = read_records(path);
    if (records.empty()) {
        return ChainState(ProtocolParams{});
    }
    ChainState state(decode_genesis_record(as_span(records[0])));
    for (std::size_t i = 1; i < records.size(); ++i) {
        Block block;
        try {
            block = decode_block(as_span(records[i]));
        } catch (const Error& e) {
            throw Error(Errc::corrupt,
                        "store record " + std::to_string(i) + ": " + e.what());
        }
        SubmitResult result = state.submit_block(block, registry);
        if (result.status != SubmitStatus::applied) {
            throw Error(Errc::corrupt, "store record " + std::to_string(i) +
                                           " failed validation: " +
                                           result.report.first_failure());
        }
    }
    return state;
}

namespace {

nlohmann::json tx_to_json(const Transaction& tx) {
    return {
        {"from", to_hex(ByteSpan(tx.from.data(), tx.from.size()))},
        {"to", to_hex(ByteSpan(tx.to.data(), tx.to.size()))},
        {"amount", tx.amount},
        {"fee", tx.fee},
        {"nonce", tx.nonce},
        {"authenticator", to_hex(as_span(tx.authenticator))},
    };
}

nlohmann::json proposal_to_json(const ProblemProposal& p) {
    return {
        {"problem_type", p.problem_type},
        {"public_params", to_hex(as_span(p.public_params))},
        {"target_regex", p.target_regex},
        {"fee", p.fee},
        {"proposed_difficulty_millibits", p.proposed_difficulty_millibits},
        {"timestamp", p.timestamp},
        {"proposer", to_hex(ByteSpan(p.proposer.data(), p.proposer.size()))},
        {"authenticator", to_hex(as_span(p.authenticator))},
        {"proposal_hash", to_hex(as_span(proposal_hash(p)))},
    };
}

}  // namespace

std::string store_export_json(const std::string& path) {
    std::vector<Bytes> records = read_records(path);
    nlohmann::json doc;
    doc["blocks"] = nlohmann::json::array();
    if (records.empty()) {
        return doc.dump(2);
    }
    ProtocolParams params = decode_genesis_record(as_span(records[0]));
    doc["params"] = {
        {"block_reward", params.block_reward},
        {"retarget_window", params.retarget_window},
        {"target_interval_seconds", params.target_interval_seconds},
        {"fallback_extra_millibits", params.fallback_extra_millibits},
        {"initial_range_millibits",
         {params.initial_range.min_millibits, params.initial_range.max_millibits}},
    };
    nlohmann::json& blocks = doc["blocks"];
    for (std::size_t i = 1; i < records.size(); ++i) {
        Block b;
        try {
            b = decode_block(as_span(records[i]));
        } catch (const Error& e) {
            throw Error(Errc::corrupt,
                        "store record " + std::to_string(i) + ": " + e.what());
        }
        nlohmann::json jb;
        jb["height"] = i;
        jb["hash"] = to_hex(as_span(header_hash(b.header)));
        jb["header"] = {
            {"version", b.header.version},
            {"prevhash", to_hex(as_span(b.header.prevhash))},
            {"tx_merkle_root", to_hex(as_span(b.header.tx_merkle_root))},
            {"problem_merkle_root", to_hex(as_span(b.header.problem_merkle_root))},
            {"problem_hash", to_hex(as_span(b.header.problem_hash))},
            {"difficulty_millibits", b.header.difficulty_millibits},
            {"timestamp", b.header.timestamp},
            {"nonce", b.header.nonce},
        };
        jb["transactions"] = nlohmann::json::array();
        for (const auto& tx : b.transactions) jb["transactions"].push_back(tx_to_json(tx));
        jb["new_problems"] = nlohmann::json::array();
        for (const auto& p : b.new_problems) jb["new_problems"].push_back(proposal_to_json(p));
        if (b.solved_problem) {
            jb["solved_problem"] = proposal_to_json(*b.solved_problem);
        } else {
            jb["solved_problem"] = nullptr;
        }
        blocks.push_back(std::move(jb));
    }
    return doc.dump(2);
}

}  // namespace pupow
