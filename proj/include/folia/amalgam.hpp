#pragma once

#include "folia/commuting.hpp"
#include "folia/errors.hpp"
#include "folia/moebius.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace folia {

enum class Factor { Right, Left };

inline const char* factor_prefix(Factor f) { return f == Factor::Right ? "R" : "L"; }

// Named generators of one embedded Fuchsian factor. Membership of words is by
// construction: elements are built from registered generators and carry their
// witness word, never solved as a matrix membership problem.
class FactorGroup {
public:
    explicit FactorGroup(Factor side) : side_(side) {}

    Factor side() const { return side_; }
    void register_generator(const std::string& name, const MoebiusMap& m);
    const MoebiusMap& generator(const std::string& name) const;
    std::vector<std::string> names() const;  // sorted

private:
    Factor side_;
    std::map<std::string, MoebiusMap> generators_;
};

struct WitnessLetter {
    std::string name;  // generator name, or "ell"
    long exp = 1;
};

// One syllable of an amalgam word: an element of a factor together with the
// word over registered generators that produced it.
struct FactorElement {
    Factor side = Factor::Right;
    MoebiusMap matrix;
    std::vector<WitnessLetter> witness;

    std::string str() const;
};

struct AmalgamWord {
    std::vector<FactorElement> syllables;
    Int tail = 0;  // trailing power of ell
};

// Serre normal form: alternating canonical left-coset representatives with an
// ell-power tail. Produced only by normalize/multiply/invert, so structural
// equality is equality in the amalgamated product.
struct NormalForm {
    std::vector<FactorElement> syllables;
    Int tail = 0;

    size_t length() const { return syllables.size(); }
    bool is_identity() const { return syllables.empty() && tail == 0; }
    bool operator==(const NormalForm& o) const;
    bool operator!=(const NormalForm& o) const { return !(*this == o); }
    bool operator<(const NormalForm& o) const;  // deterministic report order
    std::string str() const;
    // Canonical value key (sides, matrices, tail); witness-independent.
    std::string key() const;

    AmalgamWord word() const { return AmalgamWord{syllables, tail}; }
};

// Immutable registry for G_right amalgamated with G_left over <ell>. The
// left factor is stored already conjugated by the pair normalizer, so the
// core subgroup is literally the same translation on both sides.
class AmalgamContext {
public:
    AmalgamContext(FactorGroup right, FactorGroup left, ParabolicAnchor anchor);

    const FactorGroup& factor(Factor f) const { return f == Factor::Right ? right_ : left_; }
    const ParabolicAnchor& anchor() const { return anchor_; }

    MoebiusMap ell_power(const Int& k) const;
    // Exponent k with m projectively equal to ell^k, read off the translation
    // entry; nothing when m is not in the core.
    std::optional<Int> core_exponent(const MoebiusMap& m) const;

    FactorElement letter(Factor side, const std::string& name, long exp) const;
    FactorElement element(Factor side, const std::vector<WitnessLetter>& word) const;

private:
    FactorGroup right_;
    FactorGroup left_;
    ParabolicAnchor anchor_;
};

NormalForm normalize(const AmalgamContext& ctx, const AmalgamWord& w);
NormalForm multiply(const AmalgamContext& ctx, const NormalForm& u, const NormalForm& v);
NormalForm invert(const AmalgamContext& ctx, const NormalForm& u);
inline size_t length(const NormalForm& u) { return u.length(); }

// Bare projective action of a word (conjugating homeomorphisms absent):
// the matrix product of the syllables and the tail.
MoebiusMap word_matrix(const AmalgamContext& ctx, const AmalgamWord& w);

// Word literals of the form "R:p L:f R:q^-1 ell^3".
AmalgamWord parse_word(const AmalgamContext& ctx, const std::string& text);
std::string word_str(const AmalgamWord& w);

}  // namespace folia
