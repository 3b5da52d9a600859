#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "folia/action.hpp"

#include <random>

using namespace folia;
using Backend = FundamentalDomainMap::Backend;

namespace {

std::shared_ptr<const AmalgamContext> handle_context() {
    FactorGroup right(Factor::Right);
    right.register_generator("p", MoebiusMap::parse("[[1,-1],[-1,2]]"));
    right.register_generator("q", MoebiusMap::parse("[[1,1],[1,2]]"));
    FactorGroup left(Factor::Left);
    left.register_generator("p", MoebiusMap::parse("[[1,-1],[-1,2]]"));
    left.register_generator("q", MoebiusMap::parse("[[1,1],[1,2]]"));
    return std::make_shared<AmalgamContext>(std::move(right), std::move(left),
                                            ParabolicAnchor::standard());
}

const std::shared_ptr<const AmalgamContext> CTX = handle_context();
constexpr int WINDOW = 8;

// Worked handle pairing with special-orbit-free anchors: q^-2 maps a0 to
// ell^-1(a1) on the right leaf and b0 to ell^-1(b1) on the left leaf, so the
// amalgam word q^2 (right) q^-2 (left) fixes b0 through the grid alone.
struct HandleFixture {
    std::vector<Rat> targets, a_vals, b_vals;
    HandleFixture() {
        const auto anchor = ParabolicAnchor::standard();
        targets = Bisequence::default_targets(anchor, WINDOW);
        a_vals = generic_values(*CTX, targets, 4, 1001);
        b_vals = generic_values(*CTX, targets, 4, 2002);
        a_vals[WINDOW] = Rat(212, 71);
        a_vals[WINDOW + 1] = Rat(2117, 494);
        b_vals[WINDOW] = Rat(214, 71);
        b_vals[WINDOW + 1] = Rat(2143, 500);
    }
};

// Generic interior knots keep the pair (c, d) away from accidental exact
// coincidences between the two factor copies.
std::vector<std::pair<Rat, Rat>> interpolation_knots(const std::vector<Rat>& from,
                                                     const std::vector<Rat>& to, unsigned salt) {
    std::vector<std::pair<Rat, Rat>> pts{{Rat(0), Rat(0)}};
    for (size_t i = 0; i < from.size(); ++i) pts.emplace_back(from[i], to[i]);
    pts.emplace_back(Rat(6), Rat(6));
    std::vector<std::pair<Rat, Rat>> out;
    std::mt19937_64 rng(1234 + salt);
    std::uniform_int_distribution<long> jitter(-100, 100);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        out.push_back(pts[i]);
        const Rat mid_u = (pts[i].first + pts[i + 1].first) / 2;
        const Rat mid_v = (pts[i].second + pts[i + 1].second) / 2;
        const Rat span_v = (pts[i + 1].second - pts[i].second) / 8;
        out.emplace_back(mid_u, mid_v + span_v * jitter(rng) / 101);
    }
    out.push_back(pts.back());
    return out;
}

GluedAction handle_action(Backend backend = Backend::PiecewiseLinear) {
    const auto anchor = ParabolicAnchor::standard();
    const HandleFixture fx;
    const Bisequence a = synchronize(anchor, fx.targets, fx.a_vals);
    const Bisequence b = synchronize(anchor, fx.targets, fx.b_vals);
    const auto c = extend(FundamentalDomainMap(backend, interpolation_knots(fx.a_vals, fx.b_vals, 1)),
                          anchor);
    const auto d = extend(FundamentalDomainMap(backend, interpolation_knots(fx.b_vals, fx.b_vals, 2)),
                          anchor);
    return GluedAction(CTX, c, d, a, b);
}

GluedAction bare_action() {
    const auto anchor = ParabolicAnchor::standard();
    const auto targets = Bisequence::default_targets(anchor, WINDOW);
    const Bisequence seq = synchronize(anchor, targets, targets);
    const auto id = CommutingHomeo::identity(anchor);
    return GluedAction(CTX, id, id, seq, seq);
}

const AmalgamWord HANDLE_WORD = parse_word(*CTX, "R:q^2 L:q^-2");

}  // namespace

TEST_CASE("evaluate: identity word and identity conjugators") {
    const GluedAction bare = bare_action();
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<long> num(-40, 40);
    for (int i = 0; i < 30; ++i) {
        const CirclePoint x{Rat(num(rng), 7)};
        CHECK(evaluate(bare, AmalgamWord{}, x) == x);
        // With c = d = id the action is the bare matrix action.
        const AmalgamWord w = parse_word(*CTX, "R:p L:q^-1 ell^2");
        CHECK(evaluate(bare, w, x) == word_matrix(*CTX, w)(x));
    }
}

TEST_CASE("evaluate is a homomorphism compatible with normalize") {
    const GluedAction action = handle_action();
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<long> num(-40, 40);
    const AmalgamWord u = parse_word(*CTX, "R:p L:q");
    const AmalgamWord v = parse_word(*CTX, "L:p^-1 R:q ell^-1");
    const NormalForm uv = normalize(*CTX, AmalgamWord{[&] {
                                        auto s = u.syllables;
                                        s.insert(s.end(), v.syllables.begin(), v.syllables.end());
                                        return s;
                                    }(),
                                    Int(0)});
    for (int i = 0; i < 25; ++i) {
        const CirclePoint x{Rat(num(rng), 11)};
        const CirclePoint via_pair = evaluate(action, u, evaluate(action, v, x));
        CHECK(evaluate(action, uv.word(), x) == via_pair);
    }
}

TEST_CASE("well-definedness of rho(ell) through both branches") {
    const GluedAction action = handle_action();
    const MoebiusMap& ell = action.anchor().ell();
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<long> num(-200, 200);
    AmalgamWord right_ell;
    right_ell.syllables.push_back(CTX->element(Factor::Right, {{"p", -1}, {"q", -1}, {"p", 1}, {"q", 1}}));
    REQUIRE(right_ell.syllables[0].matrix == ell);  // [p,q] = z + 6 in the right factor
    AmalgamWord left_ell;
    left_ell.syllables.push_back(CTX->element(Factor::Left, {{"p", -1}, {"q", -1}, {"p", 1}, {"q", 1}}));
    for (int i = 0; i < 100; ++i) {
        const CirclePoint x{Rat(num(rng), 13)};
        CHECK(evaluate(action, right_ell, x) == ell(x));
        CHECK(evaluate(action, left_ell, x) == ell(x));
    }
}

TEST_CASE("orbit: radius zero, tree bound, density scan") {
    const GluedAction action = handle_action();
    const auto gens = std::vector<Letter>{{Factor::Right, false, "p", 1},
                                          {Factor::Right, false, "p", -1},
                                          {Factor::Right, false, "q", 1},
                                          {Factor::Right, false, "q", -1}};
    const CirclePoint root{Rat(214, 71)};
    const OrbitGraph o0 = orbit(action, root, 0, gens);
    CHECK(o0.nodes.size() == 1);

    const OrbitGraph o2 = orbit(action, root, 2, gens);
    CHECK(o2.nodes.size() <= 1 + 4 + 12);
    CHECK(o2.nodes.size() > 4);

    const OrbitGraph o8 = orbit(action, root, 8, gens);
    CHECK(o8.nodes.size() > 5000);
    CHECK(o8.max_theta_gap() <= 0.05);
    // Parent links are consistent.
    for (size_t i = 1; i < o8.nodes.size(); ++i) {
        const auto& n = o8.nodes[i];
        CHECK(apply_letter(action, n.edge, o8.nodes[static_cast<size_t>(n.parent)].point, 1) == n.point);
    }
}

TEST_CASE("handle word is fixed and certified predefined") {
    const GluedAction action = handle_action();
    const CirclePoint b0{Rat(214, 71)};
    CHECK(evaluate(action, HANDLE_WORD, b0) == b0);

    const NormalForm nf = normalize(*CTX, HANDLE_WORD);
    CHECK(nf.length() == 2);
    const auto cycle = detect_predefined_cycle(action, nf, 0);
    REQUIRE(cycle.has_value());
    CHECK(cycle->points.front() == b0);
    CHECK(cycle->points.back() == b0);
    CHECK(cycle->points.size() == nf.length() + 1);

    // The inverse and powers stay predefined (group closure).
    const NormalForm inv = invert(*CTX, nf);
    CHECK(detect_predefined_cycle(action, inv, 0).has_value());
    const NormalForm sq = multiply(*CTX, nf, nf);
    CHECK(detect_predefined_cycle(action, sq, 0).has_value());
    const NormalForm mixed = multiply(*CTX, sq, inv);
    CHECK(detect_predefined_cycle(action, mixed, 0).has_value());
}

TEST_CASE("predefined cycles are interpolant independent") {
    const NormalForm nf = normalize(*CTX, HANDLE_WORD);
    const auto pl = detect_predefined_cycle(handle_action(Backend::PiecewiseLinear), nf, 0);
    const auto cubic = detect_predefined_cycle(handle_action(Backend::MonotoneCubic), nf, 0);
    REQUIRE(pl.has_value());
    REQUIRE(cubic.has_value());
    REQUIRE(pl->points.size() == cubic->points.size());
    for (size_t i = 0; i < pl->points.size(); ++i) CHECK(pl->points[i] == cubic->points[i]);
    CHECK(pl->b_indices == cubic->b_indices);
}

TEST_CASE("trivial cycle for the identity word") {
    const GluedAction action = handle_action();
    const auto cycle = detect_predefined_cycle(action, NormalForm{}, 0);
    REQUIRE(cycle.has_value());
    CHECK(cycle->points.size() == 1);
}

TEST_CASE("stabilizer search finds the engineered handle cycle") {
    const GluedAction action = handle_action();
    const auto report = stabilizer_search(action, CirclePoint(Rat(214, 71)), 4, 1e-9);
    REQUIRE(!report.fixers.empty());
    const NormalForm expect = normalize(*CTX, HANDLE_WORD);
    bool found_handle = false;
    for (const auto& entry : report.fixers) {
        if (entry.word == expect) {
            found_handle = true;
            CHECK(entry.cls == FixClass::Predefined);
            CHECK(entry.exact_fix);
        }
    }
    CHECK(found_handle);
    CHECK(report.words_enumerated > 100);
}

TEST_CASE("free roots have no short fixers under identity conjugators") {
    const GluedAction bare = bare_action();
    // Include only one factor: with c = d = id the two copies coincide, so a
    // mixed alphabet would produce spurious kernel words by construction.
    std::vector<Letter> gens{{Factor::Right, false, "p", 1},
                             {Factor::Right, false, "p", -1},
                             {Factor::Right, false, "q", 1},
                             {Factor::Right, false, "q", -1}};
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<long> num(1, 500);
    for (int trial = 0; trial < 5; ++trial) {
        const CirclePoint x{Rat(num(rng), 101)};
        const OrbitGraph ball = orbit(bare, x, 2, gens);
        std::set<std::string> seen;
        for (const auto& n : ball.nodes) seen.insert(n.point.str());
        CHECK(seen.size() == ball.nodes.size());  // free: all words land on distinct points
    }
}

TEST_CASE("stabilizer at a hyperbolic fixed point with identity conjugators") {
    const GluedAction bare = bare_action();
    const MapClass cls = classify(CTX->factor(Factor::Right).generator("p"));
    const CirclePoint fp = cls.fixed_points[0];
    const auto report = stabilizer_search(bare, fp, 1, 1e-9);
    bool found = false;
    for (const auto& entry : report.fixers) {
        if (entry.word.length() == 1 && entry.word.syllables[0].side == Factor::Right &&
            entry.word.syllables[0].matrix == CTX->factor(Factor::Right).generator("p"))
            found = true;
    }
    CHECK(found);
}

TEST_CASE("special-point audit: clean defaults, poisoned bisequence flagged") {
    const GluedAction action = handle_action();
    CHECK(avoid_special_points_audit(action, 2).empty());

    // Poisoned configuration: a stored b-value on the right-factor orbit of
    // inf. p(2) = inf, and 2 is exactly the default target at index -1.
    const auto anchor = ParabolicAnchor::standard();
    auto targets = Bisequence::default_targets(anchor, WINDOW);
    auto poisoned = generic_values(*CTX, targets, 4, 3003);
    poisoned[WINDOW - 1] = Rat(2);
    const Bisequence bad = synchronize(anchor, targets, poisoned);
    const Bisequence a = synchronize(anchor, targets, targets);
    const auto id = CommutingHomeo::identity(anchor);
    const GluedAction poisoned_action(CTX, id, id, bad, bad);
    const auto violations = avoid_special_points_audit(poisoned_action, 1);
    CHECK(!violations.empty());
    bool hits_inf = false;
    for (const auto& v : violations) hits_inf = hits_inf || v.image.is_infinity();
    CHECK(hits_inf);
}

TEST_CASE("perturb_to_kill displaces an artificial symmetric fixer") {
    // Symmetric degenerate pair: c = d = id makes R:w L:w^-1 act trivially.
    const GluedAction bare = bare_action();
    const AmalgamWord mirror = parse_word(*CTX, "R:p L:p^-1");
    const CirclePoint b0{Rat(214, 71)};
    REQUIRE(evaluate(bare, mirror, b0) == b0);

    auto report = stabilizer_search(bare, b0, 2, 1e-9);
    const StabilizerEntry* offender = nullptr;
    for (const auto& e : report.fixers)
        if (e.cls == FixClass::NumericalFix && e.word == normalize(*CTX, mirror)) offender = &e;
    REQUIRE(offender != nullptr);

    const GluedAction fixed = perturb_to_kill(bare, *offender);
    CHECK(evaluate(fixed, mirror, b0) != b0);
    // The engineered perturbation keeps every stored control point in place.
    for (int n = -WINDOW; n <= WINDOW; ++n) {
        const CirclePoint bn{bare.b_seq().value(n)};
        CHECK(fixed.c().apply(CirclePoint(bare.a_seq().value(n))) == bn);
    }
    // Predefined offenders are rejected.
    const GluedAction action = handle_action();
    auto handle_report = stabilizer_search(action, b0, 3, 1e-9);
    for (const auto& e : handle_report.fixers) {
        if (e.cls == FixClass::Predefined) {
            CHECK_THROWS_AS(perturb_to_kill(action, e), std::invalid_argument);
            break;
        }
    }
}

TEST_CASE("audits are monotone in the length bound") {
    const GluedAction action = handle_action();
    const CirclePoint b0{Rat(214, 71)};
    const auto shallow = stabilizer_search(action, b0, 4, 1e-9);
    const auto deep = stabilizer_search(action, b0, 5, 1e-9);
    // Everything certified at the smaller bound persists at the larger one.
    std::set<std::string> deep_keys;
    for (const auto& e : deep.fixers) deep_keys.insert(e.word.key());
    for (const auto& e : shallow.fixers) CHECK(deep_keys.count(e.word.key()) == 1);
    CHECK(deep.words_enumerated > shallow.words_enumerated);
}
