#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amalgam_oracle.hpp"
#include "folia/amalgam.hpp"

#include <random>
#include <set>

using namespace folia;

namespace {

AmalgamContext handle_context() {
    FactorGroup right(Factor::Right);
    right.register_generator("p", MoebiusMap::parse("[[1,-1],[-1,2]]"));
    right.register_generator("q", MoebiusMap::parse("[[1,1],[1,2]]"));
    FactorGroup left(Factor::Left);
    left.register_generator("p", MoebiusMap::parse("[[1,-1],[-1,2]]"));
    left.register_generator("q", MoebiusMap::parse("[[1,1],[1,2]]"));
    return AmalgamContext(std::move(right), std::move(left), ParabolicAnchor::standard());
}

const AmalgamContext CTX = handle_context();

using folia_oracle::RawWord;

struct Alphabet {
    std::vector<FactorElement> letters;
    Alphabet() {
        for (const char* name : {"p", "q"}) {
            for (const long e : {1l, -1l}) {
                letters.push_back(CTX.letter(Factor::Right, name, e));
                letters.push_back(CTX.letter(Factor::Left, name, e));
            }
        }
        for (const long e : {1l, -1l}) {
            FactorElement core;
            core.side = Factor::Right;
            core.matrix = CTX.ell_power(e);
            core.witness.push_back({std::string("ell"), e});
            letters.push_back(core);
        }
    }
};

const Alphabet LETTERS;

AmalgamWord random_word(std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, LETTERS.letters.size() - 1);
    AmalgamWord w;
    for (int i = 0; i < len; ++i) w.syllables.push_back(LETTERS.letters[pick(rng)]);
    return w;
}

}  // namespace

TEST_CASE("core membership is closed-form") {
    CHECK(CTX.core_exponent(MoebiusMap::translation(12)) == Int(2));
    CHECK(CTX.core_exponent(MoebiusMap::translation(-6)) == Int(-1));
    CHECK(CTX.core_exponent(MoebiusMap::identity()) == Int(0));
    CHECK(!CTX.core_exponent(MoebiusMap::parse("[[0,-1],[1,0]]")).has_value());
    CHECK(!CTX.core_exponent(MoebiusMap::translation(3)).has_value());  // not an integer power
}

TEST_CASE("normalize: w concat w^-1 collapses to the identity") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const AmalgamWord w = random_word(rng, 1 + trial % 5);
        const NormalForm nf = normalize(CTX, w);
        const NormalForm inv = invert(CTX, nf);
        CHECK(multiply(CTX, nf, inv).is_identity());
        CHECK(multiply(CTX, inv, nf).is_identity());
    }
}

TEST_CASE("normalize: merge case yields a single syllable") {
    // [s in R][ell^k as core][t in R] merges when s ell^k t stays outside the core.
    AmalgamWord w;
    w.syllables.push_back(CTX.letter(Factor::Right, "p", 1));
    FactorElement core;
    core.side = Factor::Left;
    core.matrix = CTX.ell_power(2);
    core.witness.push_back({std::string("ell"), 2});
    w.syllables.push_back(core);
    w.syllables.push_back(CTX.letter(Factor::Right, "q", 1));
    const NormalForm nf = normalize(CTX, w);
    CHECK(nf.length() == 1);
    const MoebiusMap expect = compose(compose(CTX.factor(Factor::Right).generator("p"), CTX.ell_power(2)),
                                      CTX.factor(Factor::Right).generator("q"));
    CHECK(word_matrix(CTX, nf.word()) == expect);
}

TEST_CASE("normalize is idempotent and preserves the matrix image") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 300; ++trial) {
        const AmalgamWord w = random_word(rng, 1 + trial % 6);
        const NormalForm nf = normalize(CTX, w);
        CHECK(normalize(CTX, nf.word()) == nf);
        CHECK(word_matrix(CTX, w) == word_matrix(CTX, nf.word()));
        // Alternation and the coset-representative condition hold.
        for (size_t i = 0; i < nf.syllables.size(); ++i) {
            CHECK(!CTX.core_exponent(nf.syllables[i].matrix).has_value());
            if (i > 0) CHECK(nf.syllables[i].side != nf.syllables[i - 1].side);
            CirclePoint w0 = nf.syllables[i].matrix.inverse()(CirclePoint(0l));
            if (w0.is_infinity()) w0 = nf.syllables[i].matrix.inverse()(CirclePoint(1l));
            CHECK(reduce(CTX.anchor(), w0).k == 0);
        }
    }
}

TEST_CASE("normalize agrees with exhaustive rewrite-order brute force") {
    std::mt19937_64 rng(47);
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const AmalgamWord w = random_word(rng, 1 + trial % 4);
        RawWord raw;
        for (const auto& s : w.syllables) raw.sylls.emplace_back(s.side, s.matrix);
        const auto terminals = folia_oracle::brute_force_reduce(CTX, raw);
        REQUIRE(terminals.size() == 1);  // confluence across every rewrite order
        CHECK(*terminals.begin() == folia_oracle::canonical_of(normalize(CTX, w)));
        ++checked;
    }
    CHECK(checked == 120);
}

TEST_CASE("multiply: unit, inverse, associativity") {
    std::mt19937_64 rng(53);
    const NormalForm id;
    for (int trial = 0; trial < 50; ++trial) {
        const NormalForm u = normalize(CTX, random_word(rng, 1 + trial % 4));
        const NormalForm v = normalize(CTX, random_word(rng, 1 + (trial + 1) % 4));
        const NormalForm t = normalize(CTX, random_word(rng, 1 + (trial + 2) % 4));
        CHECK(multiply(CTX, u, id) == u);
        CHECK(multiply(CTX, id, u) == u);
        CHECK(multiply(CTX, multiply(CTX, u, v), t) == multiply(CTX, u, multiply(CTX, v, t)));
        CHECK(length(multiply(CTX, u, v)) <= length(u) + length(v));
        // Anti-homomorphism of inversion.
        CHECK(invert(CTX, multiply(CTX, u, v)) == multiply(CTX, invert(CTX, v), invert(CTX, u)));
    }
}

TEST_CASE("factor embedding: single-factor products have length at most 1") {
    std::mt19937_64 rng(59);
    std::uniform_int_distribution<int> pick(0, 1);
    for (int trial = 0; trial < 60; ++trial) {
        AmalgamWord w;
        MoebiusMap product;
        for (int i = 0; i < 4; ++i) {
            const char* name = pick(rng) ? "p" : "q";
            const long e = pick(rng) ? 1 : -1;
            w.syllables.push_back(CTX.letter(Factor::Right, name, e));
            product = compose(product, CTX.factor(Factor::Right).generator(name).pow(e));
        }
        const NormalForm nf = normalize(CTX, w);
        CHECK(nf.length() <= 1);
        CHECK(word_matrix(CTX, nf.word()) == product);
    }
}

TEST_CASE("word literals parse and round-trip through normalize") {
    const AmalgamWord w = parse_word(CTX, "R:p L:q^-1 R:q^2 ell^3");
    CHECK(w.syllables.size() == 4);  // the ell token is an explicit core syllable
    const NormalForm nf = normalize(CTX, w);
    CHECK(nf.length() == 3);
    CHECK_THROWS_AS(parse_word(CTX, "R:zz"), UnregisteredFactor);
    CHECK_THROWS_AS(parse_word(CTX, "Q:p"), std::invalid_argument);
    const AmalgamWord empty = parse_word(CTX, "");
    CHECK(normalize(CTX, empty).is_identity());
}

TEST_CASE("identity length is zero; single generators have length one") {
    CHECK(length(normalize(CTX, parse_word(CTX, ""))) == 0);
    CHECK(length(normalize(CTX, parse_word(CTX, "R:p"))) == 1);
    CHECK(length(normalize(CTX, parse_word(CTX, "ell^5"))) == 0);  // pure tail
    CHECK(normalize(CTX, parse_word(CTX, "ell^5")).tail == 5);
}
