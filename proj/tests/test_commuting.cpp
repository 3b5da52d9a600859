#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "folia/commuting.hpp"

#include <random>

using namespace folia;
using Backend = FundamentalDomainMap::Backend;

namespace {

const ParabolicAnchor ANCHOR = ParabolicAnchor::standard();  // z + 6

std::vector<std::pair<Rat, Rat>> grid_control(int N) {
    // Control pairs (target_n, value_n-ish): a mildly asymmetric exact grid.
    std::vector<std::pair<Rat, Rat>> pts{{Rat(0), Rat(0)}};
    const auto targets = Bisequence::default_targets(ANCHOR, N);
    for (size_t i = 0; i < targets.size(); ++i) {
        const Rat u = targets[i];
        const Rat v = u + (u * (Rat(6) - u)) / Rat(40);  // stays monotone and inside (0, 6)
        pts.emplace_back(u, v);
    }
    pts.emplace_back(Rat(6), Rat(6));
    return pts;
}

CirclePoint random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-600, 600);
    std::uniform_int_distribution<long> den(1, 40);
    return CirclePoint(Rat(num(rng), den(rng)));
}

}  // namespace

TEST_CASE("reduce: forced arithmetic for the standard anchor") {
    auto r = reduce(ANCHOR, CirclePoint(13l));
    CHECK(r.k == -2);
    CHECK(r.xbar == CirclePoint(1l));

    r = reduce(ANCHOR, CirclePoint::infinity());
    CHECK(r.k == 0);
    CHECK(r.xbar.is_infinity());

    r = reduce(ANCHOR, CirclePoint(3l));
    CHECK(r.k == 0);
    CHECK(r.xbar == CirclePoint(3l));

    r = reduce(ANCHOR, CirclePoint(Rat(-13, 2)));
    CHECK(r.k == 2);
    CHECK(r.xbar == CirclePoint(Rat(11, 2)));
}

TEST_CASE("reduce handles quadratic points exactly") {
    // Golden ratio (1+sqrt(5))/2 lies in [0, 6) already; shifted copies reduce back.
    const CirclePoint phi(Rat(1, 2), Rat(1, 2), Int(5));
    auto r = reduce(ANCHOR, phi);
    CHECK(r.k == 0);
    CHECK(r.xbar == phi);
    const CirclePoint far(Rat(1, 2) + 60, Rat(1, 2), Int(5));
    r = reduce(ANCHOR, far);
    CHECK(r.k == -10);
    CHECK(r.xbar == phi);
}

TEST_CASE("extend: identity control points give the identity on the circle") {
    const auto id = extend(FundamentalDomainMap::identity(Rat(6)), ANCHOR);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const CirclePoint x = random_rational(rng);
        CHECK(id.apply(x) == x);
    }
    CHECK(id.apply(CirclePoint::infinity()).is_infinity());
}

TEST_CASE("extend interpolates its control points exactly") {
    const auto pts = grid_control(8);
    for (const Backend backend : {Backend::PiecewiseLinear, Backend::MonotoneCubic}) {
        const auto c = extend(FundamentalDomainMap(backend, pts), ANCHOR);
        for (const auto& [u, v] : pts) {
            const auto img = c.apply_if_exact(CirclePoint(u));
            REQUIRE(img.has_value());
            CHECK(*img == CirclePoint(v));
            // Translated copies hit the same knots through the commutation rule.
            const auto shifted = c.apply_if_exact(CirclePoint(u + 12));
            REQUIRE(shifted.has_value());
            CHECK(*shifted == CirclePoint(v + 12));
        }
    }
}

TEST_CASE("commutation c(ell(x)) = ell(c(x)), exact on the PL backend") {
    const auto c = extend(FundamentalDomainMap(Backend::PiecewiseLinear, grid_control(8)), ANCHOR);
    const MoebiusMap& ell = ANCHOR.ell();
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        const CirclePoint x = random_rational(rng);
        CHECK(c.apply(ell(x)) == ell(c.apply(x)));
    }
}

TEST_CASE("commutation within 1e-12 on the cubic backend") {
    const auto c = extend(FundamentalDomainMap(Backend::MonotoneCubic, grid_control(8)), ANCHOR);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-40.0, 40.0);
    for (int i = 0; i < 100; ++i) {
        const double x = unif(rng);
        CHECK(c.apply_real(x + 6.0) - 6.0 == doctest::Approx(c.apply_real(x)).epsilon(1e-12));
    }
}

TEST_CASE("strict monotonicity on a circular grid") {
    for (const Backend backend : {Backend::PiecewiseLinear, Backend::MonotoneCubic}) {
        const auto c = extend(FundamentalDomainMap(backend, grid_control(8)), ANCHOR);
        double prev = c.apply_real(-3.0);
        for (int i = 1; i <= 1000; ++i) {
            const double x = -3.0 + 6.0 * i / 1000.0;
            const double y = c.apply_real(x);
            CHECK(y > prev);
            prev = y;
        }
    }
}

TEST_CASE("extend round-trips to the fundamental-domain restriction") {
    const FundamentalDomainMap hat(Backend::PiecewiseLinear, grid_control(6));
    const auto c = extend(hat, ANCHOR);
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> num(1, 599);
    for (int i = 0; i < 60; ++i) {
        const Rat u(num(rng), 100);
        CHECK(c.apply(CirclePoint(u)) == hat.eval(CirclePoint(u)));
    }
}

TEST_CASE("composition closure: interpolation chains through compose") {
    // c maps grid a -> b, d maps b -> b'; the composite maps a -> b' exactly.
    std::vector<std::pair<Rat, Rat>> ab{{Rat(0), Rat(0)}, {Rat(1), Rat(2)}, {Rat(3), Rat(7, 2)},
                                        {Rat(5), Rat(11, 2)}, {Rat(6), Rat(6)}};
    std::vector<std::pair<Rat, Rat>> bc{{Rat(0), Rat(0)}, {Rat(2), Rat(5, 2)}, {Rat(7, 2), Rat(4)},
                                        {Rat(11, 2), Rat(23, 4)}, {Rat(6), Rat(6)}};
    const auto c = extend(FundamentalDomainMap(Backend::PiecewiseLinear, ab), ANCHOR);
    const auto d = extend(FundamentalDomainMap(Backend::PiecewiseLinear, bc), ANCHOR);
    const auto dc = compose(d, c);
    CHECK(dc.apply(CirclePoint(1l)) == CirclePoint(Rat(5, 2)));
    CHECK(dc.apply(CirclePoint(3l)) == CirclePoint(4l));
    CHECK(dc.apply(CirclePoint(5l)) == CirclePoint(Rat(23, 4)));
    // Inverse of the composite undoes it exactly.
    std::mt19937_64 rng(29);
    for (int i = 0; i < 40; ++i) {
        const CirclePoint x = random_rational(rng);
        CHECK(dc.apply_inverse(dc.apply(x)) == x);
    }
}

TEST_CASE("bump_flow: zero time is the identity, nonzero time displaces the midpoint") {
    const auto none = bump_flow(ANCHOR, Rat(2), Rat(3), Rat(0), Backend::PiecewiseLinear);
    CHECK(none.apply(CirclePoint(Rat(5, 2))) == CirclePoint(Rat(5, 2)));

    const auto flow = bump_flow(ANCHOR, Rat(2), Rat(3), Rat(1, 2), Backend::PiecewiseLinear);
    CHECK(flow.apply(CirclePoint(Rat(5, 2))) != CirclePoint(Rat(5, 2)));
    // Identity outside the ell-saturation of the support.
    CHECK(flow.apply(CirclePoint(Rat(1, 2))) == CirclePoint(Rat(1, 2)));
    CHECK(flow.apply(CirclePoint(Rat(7, 2))) == CirclePoint(Rat(7, 2)));
    CHECK(flow.apply(CirclePoint(Rat(5, 2) + 6)) != CirclePoint(Rat(5, 2) + 6));

    // Displacement strictly monotone in the time parameter.
    const auto flow2 = bump_flow(ANCHOR, Rat(2), Rat(3), Rat(1), Backend::PiecewiseLinear);
    CHECK(flow2.apply(CirclePoint(Rat(5, 2))).rational() > flow.apply(CirclePoint(Rat(5, 2))).rational());

    CHECK_THROWS_AS(bump_flow(ANCHOR, Rat(0), Rat(3), Rat(1), Backend::PiecewiseLinear), BadSupport);
    CHECK_THROWS_AS(bump_flow(ANCHOR, Rat(5), Rat(6), Rat(1), Backend::PiecewiseLinear), BadSupport);
}

TEST_CASE("smooth bump flow commutes and stays supported") {
    const auto flow = bump_flow(ANCHOR, Rat(2), Rat(3), Rat(1, 4), Backend::MonotoneCubic);
    CHECK(flow.apply(CirclePoint(Rat(1))) == CirclePoint(Rat(1)));  // outside: exact identity
    const double moved = flow.apply_real(2.5);
    CHECK(moved > 2.5);
    CHECK(moved < 3.0);
    CHECK(flow.apply_real(moved + 6.0) - 6.0 == doctest::Approx(flow.apply_real(moved)).epsilon(1e-12));
    CHECK(flow.apply_inverse_real(moved) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("perturbation in lemma form: conjugated map moves a configured point") {
    // f maps x0 = 5/2 to y0 = 9/2; a flow supported around xbar0 only changes
    // the composite at x0, per the perturbation lemma's evaluation steps.
    const MoebiusMap f = MoebiusMap::parse("[[2,-1/2],[0,1]]");  // 2z - 1/2 maps 5/2 to 9/2
    const CirclePoint x0(Rat(5, 2)), y0(Rat(9, 2));
    REQUIRE(f(x0) == y0);
    const auto phi = bump_flow(ANCHOR, Rat(9, 4), Rat(11, 4), Rat(1, 3), Backend::PiecewiseLinear);
    // phi fixes y0 (outside support), so phi^-1 f phi(x0) = phi^-1(f(phi(x0))) != y0.
    const CirclePoint moved = phi.apply(x0);
    REQUIRE(moved != x0);
    const CirclePoint image = phi.apply_inverse(f(moved));
    CHECK(image != y0);
}

TEST_CASE("synchronize accepts targets and rejects out-of-window candidates") {
    const auto targets = Bisequence::default_targets(ANCHOR, 8);
    const auto ok = synchronize(ANCHOR, targets, targets);
    CHECK(ok.window() == 8);
    CHECK(ok.value(0) == Rat(3));

    auto bad = targets;
    const Bisequence probe(ANCHOR, targets, targets);
    bad[8 + 3] += probe.epsilon(3) * 2;
    try {
        synchronize(ANCHOR, targets, bad);
        FAIL("expected OutOfWindow");
    } catch (const OutOfWindow& e) {
        CHECK(e.index == 3);
    }
}

TEST_CASE("synchronization ratio at the truncation edge") {
    // (b_n - ell(0)) / (a_n - ell(0)) within 1 +- 0.1 at n = N for the
    // shipped default targets with admissible jitter.
    const int N = 16;
    const auto targets = Bisequence::default_targets(ANCHOR, N);
    const Bisequence tgt(ANCHOR, targets, targets);
    std::vector<Rat> a = targets, b = targets;
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> jitter(-100, 100);
    for (int n = -N; n <= N; ++n) {
        const Rat eps = tgt.epsilon(n);
        a[static_cast<size_t>(n + N)] += eps * jitter(rng) / 300;
        b[static_cast<size_t>(n + N)] += eps * jitter(rng) / 300;
    }
    const auto sa = synchronize(ANCHOR, targets, a);
    const auto sb = synchronize(ANCHOR, targets, b);
    const Rat ratio = (sb.value(N) - Rat(6)) / (sa.value(N) - Rat(6));
    CHECK(ratio.get_d() == doctest::Approx(1.0).epsilon(0.1));
    const Rat ratio0 = sb.value(-N) / sa.value(-N);
    CHECK(ratio0.get_d() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bisequence lookup is exact") {
    const auto targets = Bisequence::default_targets(ANCHOR, 8);
    const Bisequence seq(ANCHOR, targets, targets);
    CHECK(seq.index_of(CirclePoint(Rat(3))) == 0);
    CHECK(seq.index_of(CirclePoint(Rat(4))) == 1);
    CHECK(!seq.index_of(CirclePoint(Rat(7, 2))).has_value());
    CHECK(!seq.index_of(CirclePoint(Rat(1, 2), Rat(1, 2), Int(5))).has_value());
}

TEST_CASE("lipschitz report: identity and general Z1star maps") {
    const auto id = CommutingHomeo::identity(ANCHOR);
    const auto rep = lipschitz_report(id, 64);
    CHECK(rep.max_derivative == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.derivative_at_inf == doctest::Approx(1.0).epsilon(1e-12));

    const auto c = extend(FundamentalDomainMap(Backend::MonotoneCubic, grid_control(8)), ANCHOR);
    for (const int depth : {8, 16, 32, 64}) {
        const auto r = lipschitz_report(c, depth);
        CHECK(std::fabs(r.derivative_at_inf - 1.0) <= 1.0 / depth);
        CHECK(r.max_derivative < 3.0);
    }

    const auto pl = extend(FundamentalDomainMap(Backend::PiecewiseLinear, grid_control(8)), ANCHOR);
    CHECK_THROWS_AS(lipschitz_report(pl, 16), std::invalid_argument);
}

TEST_CASE("non-monotone control points are rejected") {
    std::vector<std::pair<Rat, Rat>> bad{{Rat(0), Rat(0)}, {Rat(2), Rat(3)}, {Rat(3), Rat(2)}, {Rat(6), Rat(6)}};
    CHECK_THROWS_AS(FundamentalDomainMap(Backend::PiecewiseLinear, bad), NonMonotone);
}
