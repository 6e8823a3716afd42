#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pupow/codec.hpp"

namespace pupow::regexdiff {

// The 32-symbol onion alphabet: a-z then 2-7.
inline constexpr int kAlphabetSize = 32;

/// Index of a symbol in the alphabet, or -1 if outside it.
int symbol_index(char c);
char index_symbol(int i);

/// Pattern AST. Supported grammar, both anchors mandatory:
///   pattern := '^' alt '$'
///   alt     := concat ('|' concat)*
///   concat  := repeat*
///   repeat  := atom ('{' m (',' n)? '}')?
///   atom    := symbol | '[' class ']' | '(' alt ')'
/// Unbounded operators (*, +, ?), '.', escapes, negated classes,
/// backreferences and lookarounds are rejected.
struct Ast {
    enum class Kind { Symbols, Concat, Alt, Repeat };

    Kind kind = Kind::Symbols;
    std::uint32_t symbol_mask = 0;  // Kind::Symbols: bit i set = symbol i allowed
    std::vector<Ast> children;      // Concat/Alt parts; Repeat has exactly one child
    int min_rep = 0;
    int max_rep = 0;
};

Ast parse_regex(const std::string& pattern);

struct Dfa {
    int start = 0;
    int dead = -1;
    std::vector<std::array<int, kAlphabetSize>> next;
    std::vector<std::uint8_t> accept;

    std::size_t state_count() const { return next.size(); }
    bool accepts(std::string_view text) const;
};

inline constexpr std::size_t kDefaultStateCap = 100000;

/// Thompson construction, subset construction, then partition-refinement
/// minimization. Throws Errc::capacity if the subset construction exceeds
/// state_cap states.
Dfa compile_dfa(const Ast& ast, std::size_t state_cap = kDefaultStateCap);

/// Parse + compile, memoized by pattern text. Compiled automata are
/// immutable; the returned pointer is shareable across threads.
std::shared_ptr<const Dfa> compile_cached(const std::string& pattern,
                                          std::size_t state_cap = kDefaultStateCap);

/// Exact number of accepted strings of the given length, by dynamic
/// programming over DFA states with arbitrary-precision counts.
BigInt count_matches(const Dfa& dfa, int length);

/// count / 32^length, evaluated in extended precision and rounded to the
/// nearest double.
double match_probability(const Dfa& dfa, int length);

/// -log2(match_probability). Returns +infinity when the count is zero;
/// proposals with infinite difficulty are rejected at the engine layer.
double difficulty_bits(const Dfa& dfa, int length);

}  // namespace pupow::regexdiff
