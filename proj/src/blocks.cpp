#include "folia/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace folia {

namespace {

// Bare-orbit avoidance of 0 and inf under the block letters plus the anchor
// translation (the hypothesis of the finite-depth genericity lemmas).
bool block_avoids_special(const Block& block, const ParabolicAnchor& anchor, const CirclePoint& x,
                          int depth) {
    const CirclePoint zero{Rat(0)};
    if (x.is_infinity() || x == zero) return false;
    std::vector<MoebiusMap> letters;
    for (const auto& [name, m] : block.sym_letters()) letters.push_back(m);
    letters.push_back(anchor.ell());
    letters.push_back(anchor.ell().inverse());
    std::set<CirclePoint> seen{x};
    std::vector<std::pair<CirclePoint, int>> queue{{x, 0}};
    size_t head = 0;
    while (head < queue.size()) {
        const auto [pt, d] = queue[head++];
        if (d == depth) continue;
        for (const MoebiusMap& g : letters) {
            const CirclePoint next = g(pt);
            if (next.is_infinity() || next == zero) return false;
            if (seen.insert(next).second) queue.emplace_back(next, d + 1);
        }
    }
    return true;
}

std::vector<std::pair<std::string, int>> parse_generator_word(const std::string& text) {
    std::vector<std::pair<std::string, int>> out;
    std::istringstream is(text);
    std::string token;
    while (is >> token) {
        int exp = 1;
        std::string head = token;
        const auto caret = token.find('^');
        if (caret != std::string::npos) {
            head = token.substr(0, caret);
            try {
                exp = std::stoi(token.substr(caret + 1));
            } catch (...) {
                throw std::invalid_argument("bad exponent in word token: " + token);
            }
        }
        if (head.empty()) throw std::invalid_argument("empty generator token");
        if (exp != 0) out.emplace_back(head, exp);
    }
    return out;
}

}  // namespace

Block Block::build(const OrbifoldSpec& spec) {
    Block out;
    out.spec_ = spec;
    for (const auto& [name, order] : spec.cone_points) {
        const auto it = spec.generators.find(name);
        if (it == spec.generators.end())
            throw WrongClass(name, "cone generator is not registered: " + name);
        const MapClass cls = classify(it->second, std::max(order + 1, 8));
        if (cls.tag != MapTag::Elliptic || cls.elliptic_order != order)
            throw WrongClass(name, "generator " + name + " is not elliptic of order " +
                                       std::to_string(order) + " (classified " + tag_name(cls.tag) + ")");
        const auto rot = rotation_number(it->second, std::max(order + 1, 8));
        out.fillings_.push_back({name, order, rot.value_or(Rat(0))});
    }
    if (spec.boundary_word.empty()) throw WrongClass("beta", "missing boundary word");
    out.boundary_ = MoebiusMap::identity();
    for (const auto& [name, exp] : parse_generator_word(spec.boundary_word)) {
        const auto it = spec.generators.find(name);
        if (it == spec.generators.end())
            throw WrongClass(name, "boundary word uses unregistered generator: " + name);
        out.boundary_ = compose(out.boundary_, it->second.pow(exp));
    }
    const MapClass bcls = classify(out.boundary_);
    if (bcls.tag != MapTag::Parabolic)
        throw WrongClass("beta", std::string("boundary word must evaluate parabolic, got ") +
                                     tag_name(bcls.tag));
    out.boundary_fixed_ = bcls.fixed_points.at(0);
    for (const auto& [name, m] : spec.generators) {
        out.letters_.emplace_back(name, m);
        out.letters_.emplace_back(name + "^-1", m.inverse());
    }
    return out;
}

Rat Block::orbifold_euler() const {
    Rat chi = 1 - 2 * Rat(spec_.genus);
    for (const auto& [name, order] : spec_.cone_points) chi -= Rat(order - 1, order);
    return chi;
}

MoebiusMap Block::word(const std::string& text) const {
    MoebiusMap m;
    for (const auto& [name, exp] : parse_generator_word(text)) {
        const auto it = spec_.generators.find(name);
        if (it == spec_.generators.end()) throw UnregisteredFactor("unknown generator: " + name);
        m = compose(m, it->second.pow(exp));
    }
    return m;
}

std::vector<MoebiusMap> Block::word_letters(const std::string& text) const {
    std::vector<MoebiusMap> out;
    for (const auto& [name, exp] : parse_generator_word(text)) {
        const auto it = spec_.generators.find(name);
        if (it == spec_.generators.end()) throw UnregisteredFactor("unknown generator: " + name);
        const MoebiusMap base = exp > 0 ? it->second : it->second.inverse();
        for (int i = 0; i < std::abs(exp); ++i) out.push_back(base);
    }
    return out;
}

Block Block::conjugated(const MoebiusMap& h) const {
    OrbifoldSpec spec = spec_;
    for (auto& [name, m] : spec.generators) m = conjugate(m, h);
    return Block::build(spec);
}

LeafType leaf_type(const Block& block, const CirclePoint& x, int depth) {
    LeafType out;
    out.depth = depth;
    // Type 2: the orbit of the parabolic fixed point (one leaf with the
    // compact boundary circle).
    std::map<CirclePoint, int> seen;
    std::vector<CirclePoint> queue{x};
    seen.emplace(x, 0);
    size_t head = 0;
    std::vector<int> depth_of{0};
    bool hits_infinity = x.is_infinity();
    while (head < queue.size() && !hits_infinity) {
        const CirclePoint cur = queue[head];
        const int d = depth_of[head++];
        if (d == depth) continue;
        for (const auto& [name, m] : block.sym_letters()) {
            const CirclePoint next = m(cur);
            if (next == block.boundary_fixed_point()) {
                hits_infinity = true;
                break;
            }
            if (seen.emplace(next, d + 1).second) {
                queue.push_back(next);
                depth_of.push_back(d + 1);
            }
        }
    }
    if (hits_infinity) {
        out.tag = LeafType::Tag::Type2;
        return out;
    }
    // Type 1: a nontrivial reduced word fixes the point (exact check).
    std::vector<std::pair<std::string, int>> stack;
    std::vector<std::pair<std::string, MoebiusMap>> letters = block.sym_letters();
    std::function<bool(const MoebiusMap&, int)> dfs = [&](const MoebiusMap& m, int len) -> bool {
        if (len > 0 && !m.is_identity() && m(x) == x) {
            out.tag = LeafType::Tag::Type1;
            out.generator = m;
            out.generator_word = stack;
            return true;
        }
        if (len == depth) return false;
        for (const auto& [name, g] : letters) {
            if (!stack.empty()) {
                const auto& [pname, pexp] = stack.back();
                const bool inverse_pair = (name == pname + "^-1") || (pname == name + "^-1");
                if (inverse_pair) continue;
            }
            stack.emplace_back(name, 1);
            if (dfs(compose(g, m), len + 1)) return true;
            stack.pop_back();
        }
        return false;
    };
    if (dfs(MoebiusMap::identity(), 0)) return out;
    out.tag = LeafType::Tag::Type0;
    return out;
}

namespace {

SideClass arc_side(const Block& block, const MapClass& cls, const CirclePoint& probe) {
    const CirclePoint& att = cls.fixed_points[0];
    const CirclePoint& rep = cls.fixed_points[1];
    if (probe == att || probe == rep) throw OnAxis("probe point sits on the stabilizer axis");
    const bool in_positive_arc = in_ccw_arc(att, probe, rep);
    const bool outer = in_positive_arc == block.spec().orientation_flag;
    return outer ? SideClass::Outer : SideClass::Inner;
}

}  // namespace

SideClass classify_side(const Block& block, const MoebiusMap& leaf_generator,
                        const MoebiusMap& witness) {
    const MapClass cls = classify(leaf_generator);
    if (cls.tag != MapTag::Hyperbolic)
        throw std::invalid_argument("classify_side requires a hyperbolic leaf generator");
    // The cusp of the component through witness(root) is witness^-1(cusp of
    // the block boundary); left ell-translates and right stabilizer powers of
    // the witness move it inside one axis arc, so the side is exact.
    const CirclePoint cusp = witness.inverse()(block.boundary_fixed_point());
    return arc_side(block, cls, cusp);
}



namespace {

std::set<CirclePoint> orbit_ball(const Block& block, const CirclePoint& root, int depth) {
    std::set<CirclePoint> seen{root};
    std::vector<std::pair<CirclePoint, int>> queue{{root, 0}};
    size_t head = 0;
    while (head < queue.size()) {
        const auto [pt, d] = queue[head++];
        if (d == depth) continue;
        for (const auto& [name, m] : block.sym_letters()) {
            const CirclePoint next = m(pt);
            if (seen.insert(next).second) queue.emplace_back(next, d + 1);
        }
    }
    return seen;
}

}  // namespace

BoundaryPoint find_boundary_point(const Block& block, const ParabolicAnchor& anchor, const Rat& target,
                                  const Rat& eps, const BoundaryRequest& want, int depth) {
    if (target <= 0 || target >= anchor.translation())
        throw std::invalid_argument("find_boundary_point: target outside the fundamental domain");
    // Exclusion balls (leaf distinctness is heuristic, bounded by the depth).
    std::vector<std::set<CirclePoint>> excluded;
    for (const auto& root : want.exclude_roots) excluded.push_back(orbit_ball(block, root, depth));
    auto is_excluded = [&](const CirclePoint& root) {
        for (const auto& ball : excluded)
            if (ball.count(root)) return true;
        return false;
    };

    MoebiusMap stabilizer;
    if (want.leaf_type == LeafType::Tag::Type1) {
        if (want.leaf_generator) {
            stabilizer = *want.leaf_generator;
        } else {
            bool found = false;
            for (const auto& [name, m] : block.spec().generators) {
                if (classify(m).tag == MapTag::Hyperbolic) {
                    stabilizer = m;
                    found = true;
                    break;
                }
            }
            if (!found) throw NotFoundAtDepth(depth, "block has no hyperbolic generator for type-1 leaves");
        }
    }

    BoundaryPoint best;
    bool have_best = false;
    double best_dist = 0.0;
    auto consider = [&](const CirclePoint& reduced, const CirclePoint& root,
                        const std::vector<std::pair<std::string, int>>& word,
                        const std::optional<MoebiusMap>& witness) {
        if (reduced.is_infinity()) return;
        const int side_lo = reduced.compare(CirclePoint(target - eps));
        const int side_hi = reduced.compare(CirclePoint(target + eps));
        if (side_lo < 0 || side_hi > 0) return;
        if (is_excluded(root)) return;
        std::optional<SideClass> side;
        if (want.leaf_type == LeafType::Tag::Type1 && witness) {
            try {
                side = classify_side(block, stabilizer, *witness);
            } catch (const OnAxis&) {
                return;
            }
            if (want.side && side != *want.side) return;
        }
        // Nearest admissible candidate wins; approximate distance suffices
        // for tie-breaking inside the window.
        const double dist = std::fabs(reduced.approx() - target.get_d());
        if (!have_best || dist < best_dist) {
            best = BoundaryPoint{reduced, root, side, word,
                                 witness ? *witness : MoebiusMap::identity()};
            best_dist = dist;
            have_best = true;
        }
    };

    if (want.leaf_type == LeafType::Tag::Type1) {
        // Orbit points of the stabilizer's fixed point, i.e. honest boundary
        // points of the type-1 leaf.
        const MapClass cls = classify(stabilizer);
        const CirclePoint root = cls.fixed_points[0];
        struct Item {
            CirclePoint pt;
            MoebiusMap witness;
            std::vector<std::pair<std::string, int>> word;
            int depth;
        };
        std::set<CirclePoint> seen{root};
        std::vector<Item> queue{{root, MoebiusMap::identity(), {}, 0}};
        size_t head = 0;
        while (head < queue.size()) {
            const Item cur = queue[head++];
            consider(reduce(anchor, cur.pt).xbar, root, cur.word, cur.witness);
            if (cur.depth == depth) continue;
            for (const auto& [name, m] : block.sym_letters()) {
                const CirclePoint next = m(cur.pt);
                if (seen.insert(next).second) {
                    auto next_word = cur.word;
                    next_word.emplace_back(name, 1);
                    queue.push_back({next, compose(m, cur.witness), next_word, cur.depth + 1});
                }
            }
        }
    } else {
        // Generic rational anchors near the target.
        for (long denom : {64l, 128l, 256l, 512l}) {
            for (long k = -denom / 2; k <= denom / 2; ++k) {
                const Rat cand = target + Rat(k, denom) * eps * 2;
                if (cand <= 0 || cand >= anchor.translation()) continue;
                if (rat_abs(cand - target) > eps) continue;
                const CirclePoint pt(cand);
                if (!block_avoids_special(block, anchor, pt, std::min(depth, 5))) continue;
                consider(pt, pt, {}, std::nullopt);
            }
            if (have_best) break;
        }
    }
    if (!have_best) throw NotFoundAtDepth(depth, "no admissible boundary point in the window");
    if (want.rational_anchor && !best.point.is_rational()) {
        // Stand-in rational anchor for the honest hit: nearby, inside the
        // window, off the special orbits.
        const double u = best.point.approx();
        for (long denom : {1l << 10, 1l << 14, 1l << 18, 1l << 22}) {
            const Rat cand(static_cast<long>(std::llround(u * static_cast<double>(denom))), denom);
            if (cand <= 0 || cand >= anchor.translation()) continue;
            if (rat_abs(cand - target) > eps) continue;
            if (is_excluded(CirclePoint(cand))) continue;
            if (!block_avoids_special(block, anchor, CirclePoint(cand), std::min(depth, 5))) continue;
            best.point = CirclePoint(cand);
            return best;
        }
        throw NotFoundAtDepth(depth, "no rational stand-in anchor near the admissible point");
    }
    return best;
}

BlockPair::BlockPair(Block right, Block left, ParabolicAnchor anchor)
    : right_(std::move(right)), left_(std::move(left)), anchor_(std::move(anchor)) {
    FactorGroup rg(Factor::Right), lg(Factor::Left);
    for (const auto& [name, m] : right_.spec().generators) rg.register_generator(name, m);
    for (const auto& [name, m] : left_.spec().generators) lg.register_generator(name, m);
    ctx_ = std::make_shared<AmalgamContext>(std::move(rg), std::move(lg), anchor_);
}

BlockPair BlockPair::build(const OrbifoldSpec& right_spec, const OrbifoldSpec& left_spec,
                           const std::optional<MoebiusMap>& sigma) {
    if (right_spec.side != Factor::Right || left_spec.side != Factor::Left)
        throw std::invalid_argument("BlockPair: side tags must be right and left");
    Block right = Block::build(right_spec);
    // Normalize the right boundary to a translation fixing inf.
    if (!right.boundary_fixed_point().is_infinity()) {
        const CirclePoint& fp = right.boundary_fixed_point();
        if (!fp.is_rational())
            throw std::invalid_argument("BlockPair: cannot normalize an irrational parabolic fixed point");
        const Rat xi = fp.rational();
        // z -> 1/(xi - z) maps xi to inf, orientation preserving.
        const MoebiusMap n(Rat(0), Rat(1), Rat(-1), xi);
        right = right.conjugated(n);
    }
    OrbifoldSpec left_adj = left_spec;
    if (sigma) {
        for (auto& [name, m] : left_adj.generators) m = conjugate(m, *sigma);
    }
    Block left = Block::build(left_adj);
    const MoebiusMap right_beta = right.boundary();
    MoebiusMap left_beta_inv = left.boundary().inverse();
    if (left_beta_inv != right_beta) {
        // Compute the residual normalizer: both are parabolic, try to match
        // by a scaling/translation conjugation when the fixed points allow.
        const MapClass lcls = classify(left_beta_inv);
        const CirclePoint& lfp = lcls.fixed_points.at(0);
        MoebiusMap mover = MoebiusMap::identity();
        if (!lfp.is_infinity()) {
            if (!lfp.is_rational())
                throw std::invalid_argument("BlockPair: left boundary fixes an irrational point");
            mover = MoebiusMap(Rat(0), Rat(1), Rat(-1), lfp.rational());
        }
        const MoebiusMap moved = compose(compose(mover, left_beta_inv), mover.inverse());
        // moved = z + s, right_beta = z + t (both fix inf now).
        if (moved.c() != 0 || right_beta.c() != 0)
            throw std::invalid_argument("BlockPair: boundary maps do not share the parabolic class");
        const Rat s = Rat(moved.b()) / Rat(moved.a());
        const Rat t = Rat(right_beta.b()) / Rat(right_beta.a());
        if (sgn(s) != sgn(t))
            throw std::invalid_argument(
                "BlockPair: boundary translations have opposite senses; invert one block");
        const Rat lambda = s / t;
        const MoebiusMap scale(lambda, Rat(0), Rat(0), Rat(1));
        const MoebiusMap varsigma = compose(scale.inverse(), mover);
        left = left.conjugated(varsigma);
        if (left.boundary().inverse() != right_beta)
            throw std::invalid_argument("BlockPair: normalization failed to align the boundaries");
    }
    const Rat t = Rat(right_beta.b()) / Rat(right_beta.a());
    const MoebiusMap ell = t > 0 ? right_beta : right_beta.inverse();
    return BlockPair(std::move(right), std::move(left), ParabolicAnchor(ell));
}

EulerReport euler_numbers(const BlockPair& pair, int iterations) {
    EulerReport out;
    out.iterations = iterations;
    out.chi_right = pair.right().orbifold_euler();
    out.chi_left = pair.left().orbifold_euler();
    out.rotation_sum_right = 0;
    out.rotation_sum_left = 0;
    for (const auto& f : pair.right().fillings()) out.rotation_sum_right += f.rotation;
    for (const auto& f : pair.left().fillings()) out.rotation_sum_left += f.rotation;
    const auto right_letters = pair.right().word_letters(pair.right().spec().boundary_word);
    const auto left_letters = pair.left().word_letters(pair.left().spec().boundary_word);
    out.boundary_translation_right =
        translation_number(right_letters, pair.anchor().ell(), iterations);
    out.boundary_translation_left =
        translation_number(left_letters, pair.anchor().ell(), iterations);
    out.side_right = out.rotation_sum_right.get_d() + out.boundary_translation_right;
    out.side_left = out.rotation_sum_left.get_d() + out.boundary_translation_left;
    out.total_abs = rat_abs(out.chi_right - out.chi_left);
    return out;
}

}  // namespace folia
