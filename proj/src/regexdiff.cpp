#include "pupow/regexdiff.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace pupow::regexdiff {

namespace {
using Float = boost::multiprecision::cpp_bin_float_50;
}

int symbol_index(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c >= '2' && c <= '7') return 26 + (c - '2');
    return -1;
}

char index_symbol(int i) {
    if (i < 26) return static_cast<char>('a' + i);
    return static_cast<char>('2' + (i - 26));
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::string& pattern) : text_(pattern) {}

    Ast run() {
        if (text_.empty()) {
            fail(Errc::parse, 0, "empty pattern");
        }
        expect('^', "pattern must be anchored with '^'");
        Ast body = parse_alt();
        expect('$', "pattern must be anchored with '$'");
        if (pos_ != text_.size()) {
            fail(Errc::parse, pos_, "trailing characters after '$'");
        }
        return body;
    }

private:
    [[noreturn]] void fail(Errc code, std::size_t at, const std::string& msg) {
        throw Error(code, "regex error at position " + std::to_string(at) + ": " + msg);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void expect(char c, const std::string& msg) {
        if (eof() || text_[pos_] != c) {
            fail(Errc::parse, pos_, msg);
        }
        ++pos_;
    }

    Ast parse_alt() {
        std::vector<Ast> branches;
        branches.push_back(parse_concat());
        while (!eof() && peek() == '|') {
            ++pos_;
            branches.push_back(parse_concat());
        }
        if (branches.size() == 1) return std::move(branches.front());
        Ast node;
        node.kind = Ast::Kind::Alt;
        node.children = std::move(branches);
        return node;
    }

    Ast parse_concat() {
        std::vector<Ast> parts;
        while (!eof() && peek() != '|' && peek() != ')' && peek() != '$') {
            parts.push_back(parse_repeat());
        }
        if (parts.size() == 1) return std::move(parts.front());
        Ast node;
        node.kind = Ast::Kind::Concat;
        node.children = std::move(parts);
        return node;
    }

    Ast parse_repeat() {
        Ast atom = parse_atom();
        if (eof()) return atom;
        char c = peek();
        if (c == '*' || c == '+' || c == '?') {
            fail(Errc::unsupported_construct, pos_,
                 std::string("unbounded repetition '") + c + "' is not supported");
        }
        if (c != '{') return atom;
        std::size_t open = pos_;
        ++pos_;
        int m = parse_int(open);
        int n = m;
        if (!eof() && peek() == ',') {
            ++pos_;
            n = parse_int(open);
        }
        expect('}', "unterminated repetition bound");
        if (n < m) {
            fail(Errc::parse, open, "repetition bound {m,n} requires m <= n");
        }
        Ast node;
        node.kind = Ast::Kind::Repeat;
        node.min_rep = m;
        node.max_rep = n;
        node.children.push_back(std::move(atom));
        return node;
    }

    int parse_int(std::size_t open) {
        if (eof() || peek() < '0' || peek() > '9') {
            fail(Errc::parse, pos_, "expected a number in repetition bound");
        }
        long v = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            v = v * 10 + (peek() - '0');
            if (v > 1000000) fail(Errc::parse, open, "repetition bound too large");
            ++pos_;
        }
        return static_cast<int>(v);
    }

    Ast parse_atom() {
        if (eof()) fail(Errc::parse, pos_, "unexpected end of pattern");
        char c = peek();
        if (c == '(') {
            ++pos_;
            Ast inner = parse_alt();
            expect(')', "unmatched '('");
            return inner;
        }
        if (c == '[') return parse_class();
        if (c == '.' || c == '\\') {
            fail(Errc::unsupported_construct, pos_,
                 std::string("'") + c + "' is not supported");
        }
        if (c == '^' || c == '$' || c == '{' || c == '}' || c == ')' || c == '*' ||
            c == '+' || c == '?') {
            fail(Errc::parse, pos_, std::string("unexpected '") + c + "'");
        }
        int idx = symbol_index(c);
        if (idx < 0) {
            fail(Errc::alphabet, pos_,
                 std::string("symbol '") + c + "' is outside the a-z2-7 alphabet");
        }
        ++pos_;
        Ast node;
        node.kind = Ast::Kind::Symbols;
        node.symbol_mask = 1u << idx;
        return node;
    }

    Ast parse_class() {
        std::size_t open = pos_;
        ++pos_;  // '['
        if (!eof() && peek() == '^') {
            fail(Errc::unsupported_construct, pos_, "negated classes are not supported");
        }
        std::uint32_t mask = 0;
        while (!eof() && peek() != ']') {
            char lo = peek();
            int lo_idx = symbol_index(lo);
            if (lo_idx < 0) {
                fail(Errc::alphabet, pos_,
                     std::string("symbol '") + lo + "' is outside the a-z2-7 alphabet");
            }
            ++pos_;
            int hi_idx = lo_idx;
            if (!eof() && peek() == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != ']') {
                ++pos_;
                char hi = peek();
                hi_idx = symbol_index(hi);
                if (hi_idx < 0) {
                    fail(Errc::alphabet, pos_,
                         std::string("symbol '") + hi + "' is outside the a-z2-7 alphabet");
                }
                if (hi_idx < lo_idx) {
                    fail(Errc::parse, pos_, "class range out of order");
                }
                ++pos_;
            }
            for (int i = lo_idx; i <= hi_idx; ++i) mask |= 1u << i;
        }
        expect(']', "unmatched '['");
        if (mask == 0) {
            fail(Errc::parse, open, "empty character class");
        }
        Ast node;
        node.kind = Ast::Kind::Symbols;
        node.symbol_mask = mask;
        return node;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Ast parse_regex(const std::string& pattern) { return Parser(pattern).run(); }

// ---------------------------------------------------------------------------
// Thompson NFA and subset construction
// ---------------------------------------------------------------------------

namespace {

struct Nfa {
    // state -> epsilon successors
    std::vector<std::vector<int>> eps;
    // state -> optional labelled edge (mask, target); mask 0 = none
    std::vector<std::uint32_t> edge_mask;
    std::vector<int> edge_to;

    int add_state() {
        eps.emplace_back();
        edge_mask.push_back(0);
        edge_to.push_back(-1);
        return static_cast<int>(eps.size()) - 1;
    }
};

struct Frag {
    int start;
    int accept;
};

Frag build_nfa(Nfa& nfa, const Ast& ast) {
    switch (ast.kind) {
        case Ast::Kind::Symbols: {
            int s = nfa.add_state();
            int a = nfa.add_state();
            nfa.edge_mask[s] = ast.symbol_mask;
            nfa.edge_to[s] = a;
            return {s, a};
        }
        case Ast::Kind::Concat: {
            int s = nfa.add_state();
            int cur = s;
            for (const Ast& child : ast.children) {
                Frag f = build_nfa(nfa, child);
                nfa.eps[cur].push_back(f.start);
                cur = f.accept;
            }
            return {s, cur};
        }
        case Ast::Kind::Alt: {
            int s = nfa.add_state();
            int a = nfa.add_state();
            for (const Ast& child : ast.children) {
                Frag f = build_nfa(nfa, child);
                nfa.eps[s].push_back(f.start);
                nfa.eps[f.accept].push_back(a);
            }
            return {s, a};
        }
        case Ast::Kind::Repeat: {
            int s = nfa.add_state();
            int cur = s;
            for (int i = 0; i < ast.min_rep; ++i) {
                Frag f = build_nfa(nfa, ast.children.front());
                nfa.eps[cur].push_back(f.start);
                cur = f.accept;
            }
            int a = nfa.add_state();
            nfa.eps[cur].push_back(a);
            for (int i = ast.min_rep; i < ast.max_rep; ++i) {
                Frag f = build_nfa(nfa, ast.children.front());
                nfa.eps[cur].push_back(f.start);
                cur = f.accept;
                nfa.eps[cur].push_back(a);
            }
            return {s, a};
        }
    }
    throw Error(Errc::internal, "unreachable AST kind");
}

using StateSet = std::vector<std::uint64_t>;

struct StateSetHash {
    std::size_t operator()(const StateSet& s) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (std::uint64_t w : s) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return h;
    }
};

void eps_closure(const Nfa& nfa, StateSet& set) {
    std::vector<int> stack;
    for (std::size_t w = 0; w < set.size(); ++w) {
        std::uint64_t bits = set[w];
        while (bits) {
            int b = std::countr_zero(bits);
            bits &= bits - 1;
            stack.push_back(static_cast<int>(w * 64 + b));
        }
    }
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : nfa.eps[s]) {
            if (!(set[t / 64] >> (t % 64) & 1)) {
                set[t / 64] |= 1ull << (t % 64);
                stack.push_back(t);
            }
        }
    }
}

Dfa minimize(const Dfa& in);

}  // namespace

Dfa compile_dfa(const Ast& ast, std::size_t state_cap) {
    Nfa nfa;
    Frag frag = build_nfa(nfa, ast);
    const std::size_t n_states = nfa.eps.size();
    const std::size_t words = (n_states + 63) / 64;

    StateSet start(words, 0);
    start[frag.start / 64] |= 1ull << (frag.start % 64);
    eps_closure(nfa, start);

    std::unordered_map<StateSet, int, StateSetHash> ids;
    std::vector<StateSet> sets;
    Dfa dfa;

    auto intern = [&](StateSet set) {
        auto it = ids.find(set);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(sets.size());
        if (sets.size() >= state_cap) {
            throw Error(Errc::capacity,
                        "DFA exceeds state cap of " + std::to_string(state_cap));
        }
        ids.emplace(set, id);
        sets.push_back(std::move(set));
        dfa.next.emplace_back();
        dfa.accept.push_back(sets.back()[frag.accept / 64] >> (frag.accept % 64) & 1);
        return id;
    };

    dfa.start = intern(std::move(start));
    for (int cur = 0; cur < static_cast<int>(sets.size()); ++cur) {
        for (int c = 0; c < kAlphabetSize; ++c) {
            StateSet succ(words, 0);
            const StateSet& set = sets[cur];
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t bits = set[w];
                while (bits) {
                    int b = std::countr_zero(bits);
                    bits &= bits - 1;
                    int s = static_cast<int>(w * 64 + b);
                    if (nfa.edge_mask[s] >> c & 1) {
                        int t = nfa.edge_to[s];
                        succ[t / 64] |= 1ull << (t % 64);
                    }
                }
            }
            eps_closure(nfa, succ);
            dfa.next[cur][c] = intern(std::move(succ));
        }
    }
    return minimize(dfa);
}

namespace {

Dfa minimize(const Dfa& in) {
    const int n = static_cast<int>(in.state_count());
    std::vector<int> cls(n);
    for (int s = 0; s < n; ++s) cls[s] = in.accept[s] ? 1 : 0;

    // Partition refinement: split classes by transition signatures until stable.
    int n_classes = 2;
    for (;;) {
        std::map<std::pair<int, std::array<int, kAlphabetSize>>, int> sig_to_class;
        std::vector<int> next_cls(n);
        for (int s = 0; s < n; ++s) {
            std::array<int, kAlphabetSize> sig;
            for (int c = 0; c < kAlphabetSize; ++c) sig[c] = cls[in.next[s][c]];
            auto key = std::make_pair(cls[s], sig);
            auto [it, inserted] = sig_to_class.emplace(key, static_cast<int>(sig_to_class.size()));
            next_cls[s] = it->second;
        }
        int next_count = static_cast<int>(sig_to_class.size());
        cls = std::move(next_cls);
        if (next_count == n_classes) break;
        n_classes = next_count;
    }

    // Renumber classes in BFS order from the start state for a canonical result.
    std::vector<int> order(n_classes, -1);
    std::vector<int> repr(n_classes, -1);
    for (int s = 0; s < n; ++s) {
        if (repr[cls[s]] < 0) repr[cls[s]] = s;
    }
    std::vector<int> queue{cls[in.start]};
    order[cls[in.start]] = 0;
    int assigned = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int c = queue[qi];
        for (int a = 0; a < kAlphabetSize; ++a) {
            int t = cls[in.next[repr[c]][a]];
            if (order[t] < 0) {
                order[t] = assigned++;
                queue.push_back(t);
            }
        }
    }

    Dfa out;
    out.next.assign(assigned, {});
    out.accept.assign(assigned, 0);
    out.start = order[cls[in.start]];
    for (int c = 0; c < n_classes; ++c) {
        if (order[c] < 0) continue;  // unreachable class
        int s = repr[c];
        for (int a = 0; a < kAlphabetSize; ++a) {
            out.next[order[c]][a] = order[cls[in.next[s][a]]];
        }
        out.accept[order[c]] = in.accept[s];
    }

    out.dead = -1;
    for (int s = 0; s < assigned; ++s) {
        if (out.accept[s]) continue;
        bool sink = true;
        for (int a = 0; a < kAlphabetSize; ++a) {
            if (out.next[s][a] != s) {
                sink = false;
                break;
            }
        }
        if (sink) {
            out.dead = s;
            break;
        }
    }
    return out;
}

}  // namespace

bool Dfa::accepts(std::string_view text) const {
    int s = start;
    for (char c : text) {
        int idx = symbol_index(c);
        if (idx < 0) return false;
        s = next[s][idx];
    }
    return accept[s] != 0;
}

std::shared_ptr<const Dfa> compile_cached(const std::string& pattern, std::size_t state_cap) {
    static std::mutex mu;
    static std::unordered_map<std::string, std::shared_ptr<const Dfa>> cache;
    {
        std::lock_guard lock(mu);
        auto it = cache.find(pattern);
        if (it != cache.end()) return it->second;
    }
    auto dfa = std::make_shared<const Dfa>(compile_dfa(parse_regex(pattern), state_cap));
    std::lock_guard lock(mu);
    auto [it, inserted] = cache.emplace(pattern, std::move(dfa));
    return it->second;
}

BigInt count_matches(const Dfa& dfa, int length) {
    if (length < 1) {
        throw Error(Errc::range, "length must be positive");
    }
    const std::size_t n = dfa.state_count();
    std::vector<BigInt> cur(n, 0), nxt(n, 0);
    cur[dfa.start] = 1;
    for (int t = 0; t < length; ++t) {
        for (auto& v : nxt) v = 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (cur[s] == 0) continue;
            for (int c = 0; c < kAlphabetSize; ++c) {
                nxt[dfa.next[s][c]] += cur[s];
            }
        }
        std::swap(cur, nxt);
    }
    BigInt total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (dfa.accept[s]) total += cur[s];
    }
    return total;
}

double match_probability(const Dfa& dfa, int length) {
    BigInt count = count_matches(dfa, length);
    BigInt space = pow(BigInt(32), static_cast<unsigned>(length));
    Float p = Float(count) / Float(space);
    return p.convert_to<double>();
}

double difficulty_bits(const Dfa& dfa, int length) {
    BigInt count = count_matches(dfa, length);
    if (count == 0) {
        return std::numeric_limits<double>::infinity();
    }
    BigInt space = pow(BigInt(32), static_cast<unsigned>(length));
    Float bits = -log(Float(count) / Float(space)) / log(Float(2));
    double out = bits.convert_to<double>();
    // Guard against -0.0 from rounding on universal languages.
    return out == 0.0 ? 0.0 : out;
}

}  // namespace pupow::regexdiff
