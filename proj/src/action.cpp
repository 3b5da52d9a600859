#include "folia/action.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace folia {

namespace {

CirclePoint conj_apply(const CommutingHomeo& h, const MoebiusMap& g, const CirclePoint& x,
                       bool left_branch) {
    // right branch: c g c^-1 ; left branch: d^-1 g d
    if (!left_branch) return h.apply(g(h.apply_inverse(x)));
    return h.apply_inverse(g(h.apply(x)));
}

std::optional<CirclePoint> conj_apply_if_exact(const CommutingHomeo& h, const MoebiusMap& g,
                                               const CirclePoint& x, bool left_branch) {
    const auto inner = left_branch ? h.apply_if_exact(x) : h.apply_inverse_if_exact(x);
    if (!inner) return std::nullopt;
    return left_branch ? h.apply_inverse_if_exact(g(*inner)) : h.apply_if_exact(g(*inner));
}

double conj_apply_real(const CommutingHomeo& h, const MoebiusMap& g, double x, bool left_branch) {
    if (!left_branch) return h.apply_real(g.apply_real(h.apply_inverse_real(x)));
    return h.apply_inverse_real(g.apply_real(h.apply_real(x)));
}

}  // namespace

GluedAction::GluedAction(std::shared_ptr<const AmalgamContext> ctx, CommutingHomeo c, CommutingHomeo d,
                         Bisequence a, Bisequence b, std::optional<Bisequence> c_seq, double tol)
    : ctx_(std::move(ctx)), c_(std::move(c)), d_(std::move(d)), a_(std::move(a)), b_(std::move(b)),
      c_seq_(std::move(c_seq)), tol_(tol) {
    if (!ctx_) throw std::invalid_argument("GluedAction: missing amalgam context");
    const auto& anchor = ctx_->anchor();
    if (c_.anchor().ell() != anchor.ell() || d_.anchor().ell() != anchor.ell())
        throw std::invalid_argument("GluedAction: anchors disagree");
    if (a_.window() != b_.window())
        throw std::invalid_argument("GluedAction: bisequence windows disagree");
    const Bisequence& img = d_image_seq();
    const int N = a_.window();
    for (int n = -N; n <= N; ++n) {
        const auto cb = c_.apply_if_exact(CirclePoint(a_.value(n)));
        if (!cb || *cb != CirclePoint(b_.value(n)))
            throw std::invalid_argument("GluedAction: c does not interpolate (a, b) on the grid");
        const auto db = d_.apply_if_exact(CirclePoint(b_.value(n)));
        if (!db || *db != CirclePoint(img.value(n)))
            throw std::invalid_argument("GluedAction: d does not interpolate (b, image) on the grid");
    }
    // Well-definedness on the core: rho(ell) through either branch is ell.
    if (c_.exact() && d_.exact()) {
        for (long probe : {0l, 1l, 5l}) {
            const CirclePoint x{Rat(probe * 7 + 2, 3)};
            const CirclePoint via_right = conj_apply(c_, anchor.ell(), x, false);
            const CirclePoint via_left = conj_apply(d_, anchor.ell(), x, true);
            if (via_right != anchor.ell()(x) || via_left != anchor.ell()(x))
                throw std::invalid_argument("GluedAction: rho(ell) differs between the factor branches");
        }
    }
}

GluedAction GluedAction::with_maps(CommutingHomeo c, CommutingHomeo d) const {
    return GluedAction(ctx_, std::move(c), std::move(d), a_, b_, c_seq_, tol_);
}

std::string Letter::str() const {
    std::string s = core ? "ell" : std::string(factor_prefix(side)) + ":" + name;
    if (exp != 1) s += "^" + std::to_string(exp);
    return s;
}

std::vector<Letter> symmetric_letters(const GluedAction& action, bool include_core) {
    std::vector<Letter> out;
    for (const Factor side : {Factor::Right, Factor::Left}) {
        for (const auto& name : action.context().factor(side).names()) {
            for (const int e : {1, -1}) out.push_back(Letter{side, false, name, e});
        }
    }
    if (include_core) {
        for (const int e : {1, -1}) out.push_back(Letter{Factor::Right, true, "ell", e});
    }
    return out;
}

AmalgamWord letters_to_word(const AmalgamContext& ctx, const std::vector<Letter>& letters) {
    AmalgamWord w;
    for (const Letter& l : letters) {
        if (l.core) {
            FactorElement core;
            core.side = Factor::Right;
            core.matrix = ctx.ell_power(l.exp);
            core.witness.push_back({std::string("ell"), l.exp});
            w.syllables.push_back(core);
        } else {
            w.syllables.push_back(ctx.letter(l.side, l.name, l.exp));
        }
    }
    return w;
}

CirclePoint apply_letter(const GluedAction& action, const Letter& letter, const CirclePoint& x,
                         int sign) {
    if (letter.core) return action.context().ell_power(Int(letter.exp * sign))(x);
    const MoebiusMap g = action.context().factor(letter.side).generator(letter.name).pow(letter.exp * sign);
    return conj_apply(letter.side == Factor::Right ? action.c() : action.d(), g, x,
                      letter.side == Factor::Left);
}

double apply_letter_real(const GluedAction& action, const Letter& letter, double x, int sign) {
    if (letter.core) {
        const double t = action.anchor().translation().get_d();
        return x + letter.exp * sign * t;
    }
    const MoebiusMap g = action.context().factor(letter.side).generator(letter.name).pow(letter.exp * sign);
    return conj_apply_real(letter.side == Factor::Right ? action.c() : action.d(), g, x,
                           letter.side == Factor::Left);
}

CirclePoint evaluate(const GluedAction& action, const AmalgamWord& w, const CirclePoint& x) {
    CirclePoint y = w.tail == 0 ? x : action.context().ell_power(w.tail)(x);
    for (auto it = w.syllables.rbegin(); it != w.syllables.rend(); ++it) {
        y = conj_apply(it->side == Factor::Right ? action.c() : action.d(), it->matrix, y,
                       it->side == Factor::Left);
    }
    return y;
}

double evaluate_real(const GluedAction& action, const AmalgamWord& w, double x) {
    double y = x + w.tail.get_d() * action.anchor().translation().get_d();
    for (auto it = w.syllables.rbegin(); it != w.syllables.rend(); ++it) {
        y = conj_apply_real(it->side == Factor::Right ? action.c() : action.d(), it->matrix, y,
                            it->side == Factor::Left);
    }
    return y;
}

double OrbitGraph::max_circular_gap() const {
    if (nodes.size() < 2) return 1.0;
    std::vector<const CirclePoint*> pts;
    pts.reserve(nodes.size());
    for (const auto& n : nodes) pts.push_back(&n.point);
    std::sort(pts.begin(), pts.end(),
              [](const CirclePoint* a, const CirclePoint* b) { return a->theta() < b->theta(); });
    double worst = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const CirclePoint& from = *pts[i];
        const CirclePoint& to = *pts[(i + 1) % pts.size()];
        worst = std::max(worst, chordal_distance(from, to));
    }
    return worst;
}

double OrbitGraph::max_theta_gap() const {
    if (nodes.size() < 2) return 1.0;
    std::vector<double> thetas;
    thetas.reserve(nodes.size());
    for (const auto& n : nodes) thetas.push_back(n.point.theta());
    std::sort(thetas.begin(), thetas.end());
    double worst = 1.0 + thetas.front() - thetas.back();
    for (size_t i = 0; i + 1 < thetas.size(); ++i) worst = std::max(worst, thetas[i + 1] - thetas[i]);
    return worst;
}

OrbitGraph orbit(const GluedAction& action, const CirclePoint& x, int radius,
                 const std::vector<Letter>& gens) {
    if (radius < 0) throw std::invalid_argument("orbit: radius must be nonnegative");
    OrbitGraph graph;
    graph.root = x;
    graph.radius = radius;
    std::map<CirclePoint, int> seen;
    graph.nodes.push_back({x, 0, -1, Letter{}});
    seen.emplace(x, 0);
    size_t head = 0;
    while (head < graph.nodes.size()) {
        const int idx = static_cast<int>(head);
        const OrbitGraph::Node cur = graph.nodes[head++];
        if (cur.depth == radius) continue;
        for (const Letter& l : gens) {
            const CirclePoint next = apply_letter(action, l, cur.point, 1);
            if (seen.emplace(next, static_cast<int>(graph.nodes.size())).second)
                graph.nodes.push_back({next, cur.depth + 1, idx, l});
        }
    }
    return graph;
}

namespace {

// One predefined step through a conjugated syllable: the incoming point must
// reduce onto the domain grid of the conjugator, the Moebius part is exact,
// and the outgoing point must reduce onto the image grid.
std::optional<CirclePoint> grid_step(const ParabolicAnchor& anchor, const Bisequence& domain,
                                     const Bisequence& image, const MoebiusMap& g_inv,
                                     const CirclePoint& x, Int& k_out, int& j_out,
                                     bool& window_exhausted) {
    const auto red_in = reduce(anchor, x);
    if (red_in.xbar.is_infinity()) return std::nullopt;
    const auto j_in = domain.index_of(red_in.xbar);
    if (!j_in) {
        window_exhausted = window_exhausted ||
                           red_in.xbar.compare(CirclePoint(domain.value(-domain.window()))) < 0 ||
                           red_in.xbar.compare(CirclePoint(domain.value(domain.window()))) > 0;
        return std::nullopt;
    }
    // x = ell^-k (domain_j); conjugator maps the domain grid to the image grid.
    const CirclePoint mid = anchor.translate(CirclePoint(image.value(*j_in)), Int(-red_in.k));
    const CirclePoint z = g_inv(mid);
    const auto red_out = reduce(anchor, z);
    if (red_out.xbar.is_infinity()) return std::nullopt;
    const auto j_out_idx = image.index_of(red_out.xbar);
    if (!j_out_idx) {
        window_exhausted = window_exhausted ||
                           red_out.xbar.compare(CirclePoint(image.value(-image.window()))) < 0 ||
                           red_out.xbar.compare(CirclePoint(image.value(image.window()))) > 0;
        return std::nullopt;
    }
    k_out = red_out.k;
    j_out = *j_out_idx;
    return anchor.translate(CirclePoint(domain.value(*j_out_idx)), Int(-red_out.k));
}

}  // namespace

std::optional<PredefinedCycle> detect_predefined_cycle(const GluedAction& action, const NormalForm& w,
                                                       int root_index) {
    const auto& anchor = action.anchor();
    const Bisequence& a = action.a_seq();
    const Bisequence& b = action.b_seq();
    const Bisequence& e = action.d_image_seq();
    if (root_index < -b.window() || root_index > b.window())
        throw WindowExhausted("predefined root index outside the stored window");
    const CirclePoint root(b.value(root_index));
    PredefinedCycle cycle;
    cycle.word = w;
    cycle.root_index = root_index;
    cycle.points.push_back(root);
    CirclePoint x = root;
    bool window_exhausted = false;
    for (const FactorElement& s : w.syllables) {
        const MoebiusMap g_inv = s.matrix.inverse();
        Int k;
        int j = 0;
        std::optional<CirclePoint> next;
        if (s.side == Factor::Right) {
            // rho(s)^-1 = c g^-1 c^-1 with c: a-grid -> b-grid.
            next = grid_step(anchor, b, a, g_inv, x, k, j, window_exhausted);
        } else {
            // rho(s)^-1 = d^-1 g^-1 d with d: b-grid -> e-grid.
            next = grid_step(anchor, b, e, g_inv, x, k, j, window_exhausted);
        }
        if (!next) {
            if (window_exhausted)
                throw WindowExhausted("predefined walk left the stored bisequence window");
            return std::nullopt;
        }
        x = *next;
        cycle.points.push_back(x);
        cycle.ks.push_back(k);
        cycle.b_indices.push_back(j);
    }
    if (w.tail != 0) {
        x = anchor.translate(x, Int(-w.tail));
        cycle.points.back() = x;
    }
    if (x != root) return std::nullopt;
    return cycle;
}

namespace {

struct SearchState {
    const GluedAction* action;
    std::vector<Letter> alphabet;
    CirclePoint root;
    int bound;
    double tol;
    bool exact;
    size_t enumerated = 0;
    double min_free = HUGE_VAL;
    bool free_exact_nonzero = true;
    std::map<NormalForm, StabilizerEntry> fixers;
    std::vector<Letter> prefix;

    void classify_candidate(const CirclePoint& y, double y_real) {
        const AmalgamWord word = letters_to_word(action->context(), prefix);
        const NormalForm nf = normalize(action->context(), word);
        if (nf.is_identity()) return;
        const double disp = exact ? chordal_distance(y, root)
                                  : std::fabs(y_real - root.approx()) /
                                        std::sqrt((1 + y_real * y_real) *
                                                  (1 + root.approx() * root.approx()));
        const bool fixes_exactly = exact && y == root;
        if (!fixes_exactly && disp >= tol) return;
        auto it = fixers.find(nf);
        if (it != fixers.end()) {
            if (prefix.size() < it->second.letters.size()) it->second.letters = prefix;
            return;
        }
        StabilizerEntry entry;
        entry.word = nf;
        entry.letters = prefix;
        entry.root = root;
        entry.displacement = disp;
        entry.exact_fix = fixes_exactly;
        const auto root_idx = action->b_seq().index_of(root);
        if (root_idx) {
            try {
                entry.certificate = detect_predefined_cycle(*action, nf, *root_idx);
            } catch (const WindowExhausted&) {
                entry.certificate = std::nullopt;
            }
        }
        entry.cls = entry.certificate ? FixClass::Predefined : FixClass::NumericalFix;
        fixers.emplace(nf, std::move(entry));
    }

    void dfs_exact(const CirclePoint& y) {
        if (static_cast<int>(prefix.size()) == bound) return;
        for (const Letter& l : alphabet) {
            if (!prefix.empty() && l.inverse_of(prefix.back())) continue;
            prefix.push_back(l);
            const CirclePoint next = apply_letter(*action, l, y, -1);
            ++enumerated;
            if (next == root) {
                classify_candidate(next, 0.0);
            } else {
                // Exact backend: displaced means exactly displaced, whatever
                // the chordal magnitude.
                const double disp = chordal_distance(next, root);
                if (disp < min_free) min_free = disp;
            }
            dfs_exact(next);
            prefix.pop_back();
        }
    }

    void dfs_real(double y) {
        if (static_cast<int>(prefix.size()) == bound) return;
        for (const Letter& l : alphabet) {
            if (!prefix.empty() && l.inverse_of(prefix.back())) continue;
            prefix.push_back(l);
            const double next = apply_letter_real(*action, l, y, -1);
            ++enumerated;
            const double r = root.approx();
            const double disp = std::fabs(next - r) / std::sqrt((1 + next * next) * (1 + r * r));
            if (disp < tol)
                classify_candidate(CirclePoint(0l), next);
            else if (disp < min_free)
                min_free = disp;
            dfs_real(next);
            prefix.pop_back();
        }
    }
};

}  // namespace

StabilizerReport stabilizer_search(const GluedAction& action, const CirclePoint& x, int length_bound,
                                   double tol, bool include_core_letters) {
    if (length_bound < 1) throw std::invalid_argument("stabilizer_search: length bound must be >= 1");
    SearchState st{&action, symmetric_letters(action, include_core_letters), x, length_bound, tol,
                   action.exact()};
    if (st.exact)
        st.dfs_exact(x);
    else
        st.dfs_real(x.approx());
    StabilizerReport report;
    report.root = x;
    report.length_bound = length_bound;
    report.words_enumerated = st.enumerated;
    report.min_free_displacement = st.min_free == HUGE_VAL ? 0.0 : st.min_free;
    report.all_free_exactly_nonzero = st.exact;
    for (auto& [nf, entry] : st.fixers) report.fixers.push_back(std::move(entry));
    return report;
}

std::vector<SpecialPointViolation> avoid_special_points_audit(const GluedAction& action,
                                                              int length_bound) {
    std::vector<SpecialPointViolation> out;
    if (length_bound < 0) return out;
    const auto alphabet = symmetric_letters(action, true);
    const Bisequence& b = action.b_seq();
    const int N = b.window();
    std::vector<Letter> prefix;
    const CirclePoint zero{Rat(0)};
    const bool exact = action.exact();
    for (int m = -N; m <= N; ++m) {
        const CirclePoint root(b.value(m));
        auto dfs = [&](auto&& self, const CirclePoint& y, double y_real) -> void {
            if (static_cast<int>(prefix.size()) == length_bound) return;
            for (const Letter& l : alphabet) {
                if (!prefix.empty() && l.inverse_of(prefix.back())) continue;
                prefix.push_back(l);
                if (exact) {
                    const CirclePoint next = apply_letter(action, l, y, -1);
                    if (next.is_infinity() || next == zero) out.push_back({prefix, m, next});
                    self(self, next, 0.0);
                } else {
                    const double next = apply_letter_real(action, l, y_real, -1);
                    if (std::fabs(next) > 1e12)
                        out.push_back({prefix, m, CirclePoint::infinity()});
                    else if (std::fabs(next) < action.tol())
                        out.push_back({prefix, m, zero});
                    self(self, y, next);
                }
                prefix.pop_back();
            }
        };
        dfs(dfs, root, root.approx());
    }
    return out;
}

GluedAction perturb_to_kill(const GluedAction& action, const StabilizerEntry& offender) {
    if (offender.cls == FixClass::Predefined)
        throw std::invalid_argument("perturb_to_kill: offender is a certified predefined stabilizer");
    const NormalForm& nf = offender.word;
    if (nf.length() < 2)
        throw NoSafeSupport("single-syllable fixers leave no off-grid cycle point to displace");
    const auto& anchor = action.anchor();
    const double t_real = anchor.translation().get_d();
    // Walk the cycle through the full maps to locate the off-grid reps. The
    // numeric backend falls back to rationalized double reps.
    std::vector<CirclePoint> reps;  // reduced coordinates of x_0 .. x_{n-1}
    std::optional<CirclePoint> x = offender.root;
    double x_real = offender.root.approx();
    reps.push_back(reduce(anchor, offender.root).xbar);
    for (size_t i = 0; i + 1 < nf.syllables.size(); ++i) {
        const FactorElement& s = nf.syllables[i];
        const CommutingHomeo& h = s.side == Factor::Right ? action.c() : action.d();
        if (x) x = conj_apply_if_exact(h, s.matrix.inverse(), *x, s.side == Factor::Left);
        x_real = conj_apply_real(h, s.matrix.inverse(), x_real, s.side == Factor::Left);
        if (x) {
            reps.push_back(reduce(anchor, *x).xbar);
        } else {
            const double red = x_real - std::floor(x_real / t_real) * t_real;
            reps.push_back(CirclePoint(Rat(static_cast<long>(std::llround(red * (1l << 30))),
                                           1l << 30)));
        }
    }
    const Bisequence& b = action.b_seq();
    auto on_grid = [&](const CirclePoint& p) { return b.index_of(p).has_value(); };
    int k0 = -1;
    for (int i = static_cast<int>(reps.size()) - 1; i >= 1; --i) {
        if (on_grid(reps[static_cast<size_t>(i)])) continue;
        bool repeated = false;
        for (int j = 0; j < i; ++j)
            if (reps[static_cast<size_t>(j)] == reps[static_cast<size_t>(i)]) repeated = true;
        if (!repeated) {
            k0 = i;
            break;
        }
    }
    if (k0 < 0) throw NoSafeSupport("every cycle point sits on the stored grid");
    const CirclePoint& center = reps[static_cast<size_t>(k0)];
    if (!center.is_rational())
        throw NoSafeSupport("cycle rep is irrational; widen the window resolution");
    const Rat c0 = center.rational();
    // Distance to everything the bump must fix.
    Rat delta = std::min(c0, Rat(action.anchor().translation() - c0));
    auto shrink = [&](const Rat& pt) {
        const Rat d = rat_abs(pt - c0);
        if (d > 0 && d < delta) delta = d;
    };
    for (const Rat& v : b.values()) shrink(v);
    for (size_t i = 0; i < reps.size(); ++i) {
        if (static_cast<int>(i) == k0 || !reps[i].is_rational()) continue;
        shrink(reps[i].rational());
    }
    delta /= 2;
    if (delta <= 0) throw NoSafeSupport("no control-point-free interval around the cycle rep");
    const Rat alpha = c0 - delta, beta = c0 + delta;
    const Rat time(1, 2);
    const FactorElement& branch = nf.syllables[static_cast<size_t>(k0)];
    if (action.exact()) {
        const FundamentalDomainMap tent = pl_bump_tent(anchor.translation(), alpha, beta, time);
        if (branch.side == Factor::Right)
            return action.with_maps(action.c().with_pl_stage(tent.inverse(), false), action.d());
        return action.with_maps(action.c(), action.d().with_pl_stage(tent, true));
    }
    const SmoothBump bump(alpha, beta, time.get_d());
    const SmoothBump bump_back(alpha, beta, -time.get_d());
    if (branch.side == Factor::Right)
        return action.with_maps(action.c().with_bump(bump_back, false), action.d());
    return action.with_maps(action.c(), action.d().with_bump(bump, true));
}

bool avoids_special_orbits(const AmalgamContext& ctx, const CirclePoint& x, int depth) {
    const CirclePoint zero{Rat(0)};
    if (x.is_infinity() || x == zero) return false;
    std::vector<MoebiusMap> letters;
    for (const Factor side : {Factor::Right, Factor::Left}) {
        for (const auto& name : ctx.factor(side).names()) {
            const MoebiusMap& g = ctx.factor(side).generator(name);
            letters.push_back(g);
            letters.push_back(g.inverse());
        }
    }
    letters.push_back(ctx.anchor().ell());
    letters.push_back(ctx.anchor().ell().inverse());
    std::map<CirclePoint, int> seen;
    std::vector<std::pair<CirclePoint, int>> queue{{x, 0}};
    seen.emplace(x, 0);
    size_t head = 0;
    while (head < queue.size()) {
        const auto [pt, d] = queue[head++];
        if (d == depth) continue;
        for (const MoebiusMap& g : letters) {
            const CirclePoint next = g(pt);
            if (next.is_infinity() || next == zero) return false;
            if (seen.emplace(next, d + 1).second) queue.emplace_back(next, d + 1);
        }
    }
    return true;
}

std::vector<Rat> generic_values(const AmalgamContext& ctx, const std::vector<Rat>& targets,
                                int depth, unsigned seed) {
    const Bisequence probe(ctx.anchor(), targets, targets);
    const int N = probe.window();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> jitter(-128, 128);
    std::vector<Rat> out = targets;
    for (int n = -N; n <= N; ++n) {
        const Rat eps = probe.epsilon(n);
        const size_t i = static_cast<size_t>(n + N);
        for (int attempt = 0; attempt < 64; ++attempt) {
            const Rat candidate = targets[i] + eps * jitter(rng) / 512;
            if (n > -N && candidate <= out[i - 1]) continue;
            if (rat_abs(candidate - targets[i]) > eps) continue;
            if (!avoids_special_orbits(ctx, CirclePoint(candidate), depth)) continue;
            out[i] = candidate;
            break;
        }
        if (!avoids_special_orbits(ctx, CirclePoint(out[i]), depth))
            throw NotFoundAtDepth(depth, "no special-orbit-avoiding value in the window");
    }
    return out;
}

}  // namespace folia
