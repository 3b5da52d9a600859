#include "folia/commuting.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

namespace {

// Exact floor of the real value of a finite circle point. The radical part
// b*sqrt(D) is bracketed by integer square roots, which pins the floor up to
// one candidate that a single exact comparison resolves.
Int floor_value(const CirclePoint& x) {
    if (x.is_rational()) return rat_floor(x.rational());
    const Rat& a = x.quad_a();
    const Rat& b = x.quad_b();
    Int m = b.get_num() * b.get_num() * x.quad_d();
    Int s;
    mpz_sqrt(s.get_mpz_t(), m.get_mpz_t());
    Rat radical_lo = sgn(b) > 0 ? Rat(s) / Rat(b.get_den()) : Rat(-(s + 1)) / Rat(b.get_den());
    Int f = rat_floor(a + radical_lo);
    if (x.compare(CirclePoint(Rat(f + 1))) >= 0) return f + 1;
    return f;
}

}  // namespace

ParabolicAnchor::ParabolicAnchor(const MoebiusMap& ell) : ell_(ell) {
    if (ell.c() != 0 || ell.a() != ell.d() || ell.b() == 0)
        throw std::invalid_argument("anchor must be a parabolic translation fixing inf");
    t_ = Rat(ell.b()) / Rat(ell.a());
    if (t_ <= 0) throw std::invalid_argument("anchor orientation requires ell(0) > 0");
}

CirclePoint ParabolicAnchor::translate(const CirclePoint& x, const Int& k) const {
    if (x.is_infinity()) return x;
    return CirclePoint(x.quad_a() + Rat(k) * t_, x.quad_b(), x.quad_d());
}

ReducedCoordinate reduce(const ParabolicAnchor& anchor, const CirclePoint& x) {
    if (x.is_infinity()) return {Int(0), x};
    const Rat& t = anchor.translation();
    const CirclePoint scaled(x.quad_a() / t, x.quad_b() / t, x.quad_d());
    Int k = -floor_value(scaled);
    return {k, anchor.translate(x, k)};
}

FundamentalDomainMap::FundamentalDomainMap(Backend backend, std::vector<std::pair<Rat, Rat>> control)
    : backend_(backend), control_(std::move(control)) {
    if (control_.size() < 2) throw NonMonotone("need at least the two endpoint control points");
    if (control_.front().first != 0 || control_.front().second != 0)
        throw NonMonotone("first control point must be (0, 0)");
    if (control_.back().first != control_.back().second)
        throw NonMonotone("last control point must be (T, T)");
    if (control_.back().first <= 0) throw NonMonotone("domain length must be positive");
    for (size_t i = 0; i + 1 < control_.size(); ++i) {
        if (control_[i].first >= control_[i + 1].first || control_[i].second >= control_[i + 1].second)
            throw NonMonotone("control points must be strictly increasing in both coordinates");
    }
    if (backend_ == Backend::MonotoneCubic) build_tangents();
}

FundamentalDomainMap FundamentalDomainMap::identity(const Rat& T, Backend backend) {
    return FundamentalDomainMap(backend, {{Rat(0), Rat(0)}, {T, T}});
}

void FundamentalDomainMap::build_tangents() {
    const size_t n = control_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = Rat(control_[i + 1].first - control_[i].first).get_d();
        delta[i] = Rat(control_[i + 1].second - control_[i].second).get_d() / h[i];
    }
    tangents_.assign(n, 1.0);  // unit derivative at both endpoints (Z1star condition)
    for (size_t i = 1; i + 1 < n; ++i) tangents_[i] = 0.5 * (delta[i - 1] + delta[i]);
    // Sufficient monotonicity box: tangent at an interior knot at most 3x the
    // adjacent secants. End intervals must accommodate the pinned derivative.
    if (delta.front() < 1.0 / 3.0 || delta.back() < 1.0 / 3.0)
        throw NonMonotone("end secants too small for unit endpoint derivative");
    for (size_t i = 1; i + 1 < n; ++i)
        tangents_[i] = std::min(tangents_[i], 3.0 * std::min(delta[i - 1], delta[i]));
}

CirclePoint FundamentalDomainMap::eval(const CirclePoint& x) const {
    if (backend_ != Backend::PiecewiseLinear) {
        if (auto v = knot_image(x)) return CirclePoint(*v);
        throw NotExactlyEvaluable("cubic backend evaluates exactly only on knots");
    }
    if (x.compare(CirclePoint(Rat(0))) < 0 || x.compare(CirclePoint(control_.back().first)) > 0)
        throw std::invalid_argument("evaluation outside the fundamental domain");
    // Last knot with u <= x, by binary search.
    size_t lo = 0, hi = control_.size() - 1;
    while (lo + 1 < hi) {
        const size_t mid = (lo + hi) / 2;
        if (x.compare(CirclePoint(control_[mid].first)) >= 0)
            lo = mid;
        else
            hi = mid;
    }
    if (x.is_rational() && x.rational() == control_[lo].first) return CirclePoint(control_[lo].second);
    if (x.is_rational() && x.rational() == control_[lo + 1].first)
        return CirclePoint(control_[lo + 1].second);
    const Rat slope = (control_[lo + 1].second - control_[lo].second) /
                      (control_[lo + 1].first - control_[lo].first);
    return CirclePoint(control_[lo].second + (x.quad_a() - control_[lo].first) * slope,
                       x.quad_b() * slope, x.quad_d());
}

CirclePoint FundamentalDomainMap::eval_inverse(const CirclePoint& y) const {
    if (backend_ != Backend::PiecewiseLinear) {
        if (auto u = knot_preimage(y)) return CirclePoint(*u);
        throw NotExactlyEvaluable("cubic backend inverts exactly only on knots");
    }
    if (y.compare(CirclePoint(Rat(0))) < 0 || y.compare(CirclePoint(control_.back().second)) > 0)
        throw std::invalid_argument("evaluation outside the fundamental domain");
    size_t lo = 0, hi = control_.size() - 1;
    while (lo + 1 < hi) {
        const size_t mid = (lo + hi) / 2;
        if (y.compare(CirclePoint(control_[mid].second)) >= 0)
            lo = mid;
        else
            hi = mid;
    }
    if (y.is_rational() && y.rational() == control_[lo].second) return CirclePoint(control_[lo].first);
    if (y.is_rational() && y.rational() == control_[lo + 1].second)
        return CirclePoint(control_[lo + 1].first);
    const Rat slope = (control_[lo + 1].first - control_[lo].first) /
                      (control_[lo + 1].second - control_[lo].second);
    return CirclePoint(control_[lo].first + (y.quad_a() - control_[lo].second) * slope,
                       y.quad_b() * slope, y.quad_d());
}

std::optional<Rat> FundamentalDomainMap::knot_image(const CirclePoint& x) const {
    if (!x.is_rational()) return std::nullopt;
    const Rat& v = x.rational();
    const auto it = std::lower_bound(control_.begin(), control_.end(), v,
                                     [](const auto& knot, const Rat& key) { return knot.first < key; });
    if (it == control_.end() || it->first != v) return std::nullopt;
    return it->second;
}

std::optional<Rat> FundamentalDomainMap::knot_preimage(const CirclePoint& y) const {
    if (!y.is_rational()) return std::nullopt;
    const Rat& v = y.rational();
    const auto it = std::lower_bound(control_.begin(), control_.end(), v,
                                     [](const auto& knot, const Rat& key) { return knot.second < key; });
    if (it == control_.end() || it->second != v) return std::nullopt;
    return it->first;
}

size_t FundamentalDomainMap::segment_real(double x) const {
    size_t lo = 0;
    for (size_t i = 0; i + 1 < control_.size(); ++i) {
        if (x >= control_[i].first.get_d()) lo = i;
        else break;
    }
    return lo;
}

double FundamentalDomainMap::eval_real(double x) const {
    const size_t i = segment_real(x);
    const double u0 = control_[i].first.get_d(), u1 = control_[i + 1].first.get_d();
    const double v0 = control_[i].second.get_d(), v1 = control_[i + 1].second.get_d();
    const double h = u1 - u0;
    const double t = std::clamp((x - u0) / h, 0.0, 1.0);
    if (backend_ == Backend::PiecewiseLinear) return v0 + t * (v1 - v0);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * tangents_[i] +
           (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * tangents_[i + 1];
}

double FundamentalDomainMap::eval_inverse_real(double y) const {
    if (backend_ == Backend::PiecewiseLinear) return inverse().eval_real(y);
    double lo = 0.0, hi = control_.back().first.get_d();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (eval_real(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double FundamentalDomainMap::derivative_real(double x) const {
    const size_t i = segment_real(x);
    const double u0 = control_[i].first.get_d(), u1 = control_[i + 1].first.get_d();
    const double v0 = control_[i].second.get_d(), v1 = control_[i + 1].second.get_d();
    const double h = u1 - u0;
    if (backend_ == Backend::PiecewiseLinear) return (v1 - v0) / h;
    const double t = std::clamp((x - u0) / h, 0.0, 1.0);
    return (6 * t * t - 6 * t) * (v0 - v1) / h + (3 * t * t - 4 * t + 1) * tangents_[i] +
           (3 * t * t - 2 * t) * tangents_[i + 1];
}

FundamentalDomainMap FundamentalDomainMap::inverse() const {
    if (backend_ != Backend::PiecewiseLinear)
        throw NotExactlyEvaluable("only the PL backend has an exact inverse");
    std::vector<std::pair<Rat, Rat>> swapped;
    swapped.reserve(control_.size());
    for (const auto& [u, v] : control_) swapped.emplace_back(v, u);
    return FundamentalDomainMap(Backend::PiecewiseLinear, std::move(swapped));
}

FundamentalDomainMap compose_pl(const FundamentalDomainMap& outer, const FundamentalDomainMap& inner) {
    if (!outer.exact() || !inner.exact())
        throw NotExactlyEvaluable("compose_pl requires piecewise-linear maps");
    if (outer.domain_length() != inner.domain_length())
        throw std::invalid_argument("compose_pl: domain mismatch");
    std::vector<Rat> knots;
    for (const auto& [u, v] : inner.control()) knots.push_back(u);
    for (const auto& [u, v] : outer.control())
        knots.push_back(inner.eval_inverse(CirclePoint(u)).rational());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<std::pair<Rat, Rat>> control;
    control.reserve(knots.size());
    for (const Rat& u : knots)
        control.emplace_back(u, outer.eval(inner.eval(CirclePoint(u))).rational());
    return FundamentalDomainMap(FundamentalDomainMap::Backend::PiecewiseLinear, std::move(control));
}

SmoothBump::SmoothBump(const Rat& alpha, const Rat& beta, double time, double step)
    : alpha_(alpha), beta_(beta), time_(time), step_(step) {
    if (alpha >= beta) throw BadSupport("empty bump support");
    if (step <= 0) throw std::invalid_argument("bump integration step must be positive");
}

bool SmoothBump::outside_support(const CirclePoint& x) const {
    if (x.is_infinity()) return true;
    return x.compare(CirclePoint(alpha_)) <= 0 || x.compare(CirclePoint(beta_)) >= 0;
}

double SmoothBump::integrate(double x, double time) const {
    const double a = alpha_.get_d(), b = beta_.get_d();
    if (x <= a || x >= b) return x;
    const double half = 0.5 * (b - a);
    const double norm = half * half * half * half;
    auto field = [&](double z) {
        if (z <= a || z >= b) return 0.0;
        const double p = (z - a) * (b - z);
        return p * p / norm;
    };
    double remaining = std::fabs(time);
    const double dir = time >= 0 ? 1.0 : -1.0;
    while (remaining > 0) {
        const double h = dir * std::min(step_, remaining);
        const double k1 = field(x);
        const double k2 = field(x + 0.5 * h * k1);
        const double k3 = field(x + 0.5 * h * k2);
        const double k4 = field(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        x = std::clamp(x, a, b);
        remaining -= std::fabs(h);
    }
    return x;
}

double SmoothBump::forward(double x) const { return integrate(x, time_); }
double SmoothBump::backward(double y) const { return integrate(y, -time_); }

CommutingHomeo CommutingHomeo::identity(const ParabolicAnchor& anchor) {
    return CommutingHomeo(anchor, Smoothness::Z1star, {});
}

bool CommutingHomeo::exact() const {
    for (const auto& stage : stages_)
        if (!stage.map || !stage.map->exact()) return false;
    return true;
}

std::optional<CirclePoint> CommutingHomeo::run_chain(const CirclePoint& xbar, bool inverse) const {
    CirclePoint v = xbar;
    auto eval_stage = [&](const Stage& stage, bool inv) -> std::optional<CirclePoint> {
        const bool use_inverse = stage.inverted != inv;
        if (stage.map) {
            if (stage.map->exact())
                return use_inverse ? stage.map->eval_inverse(v) : stage.map->eval(v);
            if (auto knot = use_inverse ? stage.map->knot_preimage(v) : stage.map->knot_image(v))
                return CirclePoint(*knot);
            return std::nullopt;
        }
        if (stage.bump->outside_support(v)) return v;
        return std::nullopt;
    };
    if (!inverse) {
        for (const auto& stage : stages_) {
            auto next = eval_stage(stage, false);
            if (!next) return std::nullopt;
            v = *next;
        }
    } else {
        for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
            auto next = eval_stage(*it, true);
            if (!next) return std::nullopt;
            v = *next;
        }
    }
    return v;
}

double CommutingHomeo::run_chain_real(double xbar, bool inverse) const {
    double v = xbar;
    auto eval_stage = [&](const Stage& stage, bool inv) {
        const bool use_inverse = stage.inverted != inv;
        if (stage.map) return use_inverse ? stage.map->eval_inverse_real(v) : stage.map->eval_real(v);
        return use_inverse ? stage.bump->backward(v) : stage.bump->forward(v);
    };
    if (!inverse)
        for (const auto& stage : stages_) v = eval_stage(stage, false);
    else
        for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) v = eval_stage(*it, true);
    return v;
}

std::optional<CirclePoint> CommutingHomeo::apply_if_exact(const CirclePoint& x) const {
    if (x.is_infinity()) return x;
    const auto red = reduce(anchor_, x);
    auto image = run_chain(red.xbar, false);
    if (!image) return std::nullopt;
    return anchor_.translate(*image, Int(-red.k));
}

std::optional<CirclePoint> CommutingHomeo::apply_inverse_if_exact(const CirclePoint& x) const {
    if (x.is_infinity()) return x;
    const auto red = reduce(anchor_, x);
    auto image = run_chain(red.xbar, true);
    if (!image) return std::nullopt;
    return anchor_.translate(*image, Int(-red.k));
}

CirclePoint CommutingHomeo::apply(const CirclePoint& x) const {
    if (auto v = apply_if_exact(x)) return *v;
    throw NotExactlyEvaluable("commuting homeomorphism is not exactly evaluable here");
}

CirclePoint CommutingHomeo::apply_inverse(const CirclePoint& x) const {
    if (auto v = apply_inverse_if_exact(x)) return *v;
    throw NotExactlyEvaluable("commuting homeomorphism is not exactly evaluable here");
}

double CommutingHomeo::apply_real(double x) const {
    if (std::isinf(x)) return x;
    const double t = anchor_.translation().get_d();
    const double k = std::floor(x / t);
    return run_chain_real(x - k * t, false) + k * t;
}

double CommutingHomeo::apply_inverse_real(double x) const {
    if (std::isinf(x)) return x;
    const double t = anchor_.translation().get_d();
    const double k = std::floor(x / t);
    return run_chain_real(x - k * t, true) + k * t;
}

CommutingHomeo CommutingHomeo::with_bump(const SmoothBump& bump, bool before) const {
    if (bump.alpha() <= 0 || bump.beta() >= anchor_.translation())
        throw BadSupport("bump support must avoid the orbit of 0");
    std::vector<Stage> stages = stages_;
    Stage stage;
    stage.bump = std::make_shared<SmoothBump>(bump);
    if (before)
        stages.insert(stages.begin(), stage);
    else
        stages.push_back(stage);
    return CommutingHomeo(anchor_, smoothness_, std::move(stages));
}

CommutingHomeo CommutingHomeo::with_pl_stage(const FundamentalDomainMap& stage_map, bool before) const {
    std::vector<Stage> stages = stages_;
    const bool collapse = exact() && stage_map.exact();
    if (collapse && stages.size() == 1 && stages[0].map) {
        const FundamentalDomainMap merged = before ? compose_pl(*stages[0].map, stage_map)
                                                   : compose_pl(stage_map, *stages[0].map);
        stages[0].map = std::make_shared<FundamentalDomainMap>(merged);
    } else {
        Stage stage;
        stage.map = std::make_shared<FundamentalDomainMap>(stage_map);
        if (before)
            stages.insert(stages.begin(), stage);
        else
            stages.push_back(stage);
    }
    Smoothness tag = stage_map.exact() ? Smoothness::Z0 : smoothness_;
    return CommutingHomeo(anchor_, tag, std::move(stages));
}

CommutingHomeo extend(const FundamentalDomainMap& hat, const ParabolicAnchor& anchor) {
    if (hat.domain_length() != anchor.translation())
        throw std::invalid_argument("extend: fundamental-domain length must equal ell(0)");
    CommutingHomeo::Stage stage;
    stage.map = std::make_shared<FundamentalDomainMap>(hat);
    const auto tag = hat.backend() == FundamentalDomainMap::Backend::MonotoneCubic
                         ? CommutingHomeo::Smoothness::Z1star
                         : CommutingHomeo::Smoothness::Z0;
    return CommutingHomeo(anchor, tag, {stage});
}

CommutingHomeo compose(const CommutingHomeo& outer, const CommutingHomeo& inner) {
    if (outer.anchor().ell() != inner.anchor().ell())
        throw std::invalid_argument("compose: anchors differ");
    if (outer.exact() && inner.exact() && outer.stages().size() <= 1 && inner.stages().size() <= 1) {
        const Rat T = outer.anchor().translation();
        const FundamentalDomainMap id = FundamentalDomainMap::identity(T);
        const FundamentalDomainMap& o = outer.stages().empty() ? id : *outer.stages()[0].map;
        const FundamentalDomainMap& i = inner.stages().empty() ? id : *inner.stages()[0].map;
        return extend(compose_pl(o, i), outer.anchor());
    }
    std::vector<CommutingHomeo::Stage> stages = inner.stages();
    stages.insert(stages.end(), outer.stages().begin(), outer.stages().end());
    const auto tag = (outer.smoothness() == CommutingHomeo::Smoothness::Z1star &&
                      inner.smoothness() == CommutingHomeo::Smoothness::Z1star)
                         ? CommutingHomeo::Smoothness::Z1star
                         : CommutingHomeo::Smoothness::Z0;
    return CommutingHomeo(outer.anchor(), tag, std::move(stages));
}

FundamentalDomainMap pl_bump_tent(const Rat& T, const Rat& alpha, const Rat& beta, const Rat& time) {
    if (alpha <= 0 || beta >= T || alpha >= beta) throw BadSupport("tent support must sit inside (0, T)");
    const Rat mid = (alpha + beta) / 2;
    // Displacement strictly monotone in the time parameter, capped inside the tent.
    const Rat span = (beta - alpha) / 4;
    const Rat shift = time / (1 + rat_abs(time)) * span;
    if (shift == 0) return FundamentalDomainMap::identity(T);
    std::vector<std::pair<Rat, Rat>> control{{Rat(0), Rat(0)},
                                             {alpha, alpha},
                                             {mid, mid + shift},
                                             {beta, beta},
                                             {T, T}};
    return FundamentalDomainMap(FundamentalDomainMap::Backend::PiecewiseLinear, std::move(control));
}

CommutingHomeo bump_flow(const ParabolicAnchor& anchor, const Rat& alpha, const Rat& beta,
                         const Rat& time, FundamentalDomainMap::Backend backend) {
    if (alpha <= 0 || beta >= anchor.translation() || alpha >= beta)
        throw BadSupport("bump support must sit strictly inside (0, ell(0))");
    if (backend == FundamentalDomainMap::Backend::PiecewiseLinear)
        return extend(pl_bump_tent(anchor.translation(), alpha, beta, time), anchor);
    return CommutingHomeo::identity(anchor).with_bump(SmoothBump(alpha, beta, time.get_d()), false);
}

Bisequence::Bisequence(const ParabolicAnchor& anchor, std::vector<Rat> targets, std::vector<Rat> values)
    : T_(anchor.translation()), targets_(std::move(targets)), values_(std::move(values)) {
    if (targets_.empty() || targets_.size() != values_.size() || targets_.size() % 2 == 0)
        throw std::invalid_argument("bisequence window must be odd-sized and matched");
    for (size_t i = 0; i < targets_.size(); ++i) {
        if (targets_[i] <= 0 || targets_[i] >= T_)
            throw std::invalid_argument("bisequence targets must lie inside (0, ell(0))");
        if (i > 0 && targets_[i - 1] >= targets_[i])
            throw std::invalid_argument("bisequence targets must be strictly increasing");
    }
    const int N = window();
    for (int n = -N; n <= N; ++n) {
        const Rat& v = value(n);
        if (v <= 0 || v >= T_)
            throw OutOfWindow(n, "bisequence value escapes the fundamental domain");
        if (rat_abs(v - target(n)) > epsilon(n))
            throw OutOfWindow(n, "bisequence value escapes its synchronization window");
        if (n > -N && value(n - 1) >= v)
            throw OutOfWindow(n, "bisequence values must be strictly increasing");
    }
}

Rat Bisequence::epsilon(int n) const {
    const int N = window();
    const Rat& b = target(n);
    Rat eps(-1);
    auto consider = [&](const Rat& candidate) {
        if (eps < 0 || candidate < eps) eps = candidate;
    };
    if (n != 0) {
        const Rat absn(std::abs(n));
        consider(b / absn);
        consider((T_ - b) / absn);
    }
    if (n + 1 <= N) consider(target(n + 1) - b);
    if (n - 1 >= -N) consider(b - target(n - 1));
    return eps;
}

std::optional<int> Bisequence::index_of(const CirclePoint& x) const {
    if (!x.is_rational()) return std::nullopt;
    const auto it = std::lower_bound(values_.begin(), values_.end(), x.rational());
    if (it == values_.end() || *it != x.rational()) return std::nullopt;
    return static_cast<int>(it - values_.begin()) - window();
}

std::vector<Rat> Bisequence::default_targets(const ParabolicAnchor& anchor, int N) {
    const Rat& T = anchor.translation();
    std::vector<Rat> out;
    out.reserve(static_cast<size_t>(2 * N + 1));
    for (int n = -N; n <= N; ++n) {
        if (n >= 0)
            out.push_back(T * Rat(n + 1, n + 2));
        else
            out.push_back(T / Rat(2 - n));
    }
    return out;
}

Bisequence synchronize(const ParabolicAnchor& anchor, const std::vector<Rat>& targets,
                       const std::vector<Rat>& candidates) {
    return Bisequence(anchor, targets, candidates);
}

LipschitzReport lipschitz_report(const CommutingHomeo& c, int grid_depth) {
    if (c.smoothness() != CommutingHomeo::Smoothness::Z1star)
        throw std::invalid_argument("lipschitz_report requires the Z1star smoothness tag");
    if (grid_depth < 1) throw std::invalid_argument("grid depth must be positive");
    const double t = c.anchor().translation().get_d();
    LipschitzReport out{0.0, 1.0, grid_depth};
    double worst = 0.0;
    for (const double side : {1.0, -1.0}) {
        const double x = side * (grid_depth + 0.5) * t;
        const double ratio = x / c.apply_real(x);
        if (std::fabs(ratio - 1.0) > worst) {
            worst = std::fabs(ratio - 1.0);
            out.derivative_at_inf = ratio;
        }
    }
    const int samples = 512;
    const double h = t / (8.0 * samples);
    for (int cell = -2; cell <= 2; ++cell) {
        for (int i = 0; i < samples; ++i) {
            const double x = cell * t + (i + 0.25) * t / samples;
            const double d = (c.apply_real(x + h) - c.apply_real(x)) / h;
            out.max_derivative = std::max(out.max_derivative, d);
        }
    }
    return out;
}

}  // namespace folia
