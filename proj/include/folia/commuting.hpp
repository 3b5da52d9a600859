#pragma once

#include "folia/errors.hpp"
#include "folia/moebius.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace folia {

// A parabolic deck map z + t fixing inf, with t = ell(0) > 0, together with
// the fundamental domain [0, t) of its action on the line.
class ParabolicAnchor {
public:
    explicit ParabolicAnchor(const MoebiusMap& ell);
    static ParabolicAnchor standard() { return ParabolicAnchor(MoebiusMap::translation(6)); }

    const MoebiusMap& ell() const { return ell_; }
    const Rat& translation() const { return t_; }

    CirclePoint translate(const CirclePoint& x, const Int& k) const;  // ell^k(x)

private:
    MoebiusMap ell_;
    Rat t_;
};

struct ReducedCoordinate {
    Int k;            // ell^k(x) lands in [0, t); k = 0 for inf
    CirclePoint xbar;
};

ReducedCoordinate reduce(const ParabolicAnchor& anchor, const CirclePoint& x);

// Orientation-preserving self-map of [0, T] fixing both endpoints, stored by
// its control points. The piecewise-linear backend evaluates exactly over any
// real quadratic field; the monotone cubic backend (Fritsch-Carlson tangents,
// endpoint derivative pinned to 1) evaluates in doubles but is still exact on
// its knots.
class FundamentalDomainMap {
public:
    enum class Backend { PiecewiseLinear, MonotoneCubic };

    FundamentalDomainMap(Backend backend, std::vector<std::pair<Rat, Rat>> control);
    static FundamentalDomainMap identity(const Rat& T, Backend backend = Backend::PiecewiseLinear);

    Backend backend() const { return backend_; }
    bool exact() const { return backend_ == Backend::PiecewiseLinear; }
    const std::vector<std::pair<Rat, Rat>>& control() const { return control_; }
    const Rat& domain_length() const { return control_.back().first; }

    CirclePoint eval(const CirclePoint& x) const;          // exact; PL only off-knot
    CirclePoint eval_inverse(const CirclePoint& y) const;
    std::optional<Rat> knot_image(const CirclePoint& x) const;
    std::optional<Rat> knot_preimage(const CirclePoint& y) const;

    double eval_real(double x) const;
    double eval_inverse_real(double y) const;
    double derivative_real(double x) const;

    FundamentalDomainMap inverse() const;  // PL only

private:
    void build_tangents();
    size_t segment_real(double x) const;

    Backend backend_;
    std::vector<std::pair<Rat, Rat>> control_;
    std::vector<double> tangents_;  // cubic backend
};

// Exact composition outer(inner(x)) of two piecewise-linear maps; the knot
// set is the union of inner knots with inner-preimages of outer knots.
FundamentalDomainMap compose_pl(const FundamentalDomainMap& outer, const FundamentalDomainMap& inner);

// Time-t map of the flow of b(x) d/dx where b is a quartic bump supported on
// [alpha, beta], integrated with fixed-step RK4. Identity outside the support.
class SmoothBump {
public:
    SmoothBump(const Rat& alpha, const Rat& beta, double time, double step = 1e-3);

    const Rat& alpha() const { return alpha_; }
    const Rat& beta() const { return beta_; }
    double time() const { return time_; }

    bool outside_support(const CirclePoint& x) const;
    double forward(double x) const;
    double backward(double y) const;

private:
    double integrate(double x, double time) const;
    Rat alpha_, beta_;
    double time_;
    double step_;
};

// Element of Z^0_+(ell; 0): a circle homeomorphism commuting with ell and
// fixing 0 and inf, determined by a chain of fundamental-domain stages via
// c(x) = ell^-k(chain(ell^k(x))).
class CommutingHomeo {
public:
    enum class Smoothness { Z0, Z1star };

    struct Stage {
        std::shared_ptr<const FundamentalDomainMap> map;  // exactly one of map/bump set
        std::shared_ptr<const SmoothBump> bump;
        bool inverted = false;
    };

    static CommutingHomeo identity(const ParabolicAnchor& anchor);

    const ParabolicAnchor& anchor() const { return anchor_; }
    Smoothness smoothness() const { return smoothness_; }
    const std::vector<Stage>& stages() const { return stages_; }
    bool exact() const;  // every stage evaluates exactly everywhere

    CirclePoint apply(const CirclePoint& x) const;  // throws NotExactlyEvaluable
    CirclePoint apply_inverse(const CirclePoint& x) const;
    std::optional<CirclePoint> apply_if_exact(const CirclePoint& x) const;
    std::optional<CirclePoint> apply_inverse_if_exact(const CirclePoint& x) const;
    double apply_real(double x) const;
    double apply_inverse_real(double x) const;

    // Composition with a bump stage; `before` composes on the fundamental
    // domain as chain∘bump, otherwise bump∘chain. PL surrogates collapse into
    // a single exact piecewise-linear stage.
    CommutingHomeo with_bump(const SmoothBump& bump, bool before) const;
    CommutingHomeo with_pl_stage(const FundamentalDomainMap& stage, bool before) const;

    friend CommutingHomeo extend(const FundamentalDomainMap& hat, const ParabolicAnchor& anchor);
    friend CommutingHomeo compose(const CommutingHomeo& outer, const CommutingHomeo& inner);

private:
    CommutingHomeo(ParabolicAnchor anchor, Smoothness smoothness, std::vector<Stage> stages)
        : anchor_(std::move(anchor)), smoothness_(smoothness), stages_(std::move(stages)) {}
    std::optional<CirclePoint> run_chain(const CirclePoint& xbar, bool inverse) const;
    double run_chain_real(double xbar, bool inverse) const;

    ParabolicAnchor anchor_;
    Smoothness smoothness_;
    std::vector<Stage> stages_;
};

CommutingHomeo extend(const FundamentalDomainMap& hat, const ParabolicAnchor& anchor);
CommutingHomeo compose(const CommutingHomeo& outer, const CommutingHomeo& inner);

// The supported piece of a bump perturbation as a piecewise-linear tent:
// identity outside (alpha, beta), midpoint displaced by a strictly monotone
// rational function of the time parameter.
FundamentalDomainMap pl_bump_tent(const Rat& T, const Rat& alpha, const Rat& beta, const Rat& time);

CommutingHomeo bump_flow(const ParabolicAnchor& anchor, const Rat& alpha, const Rat& beta,
                         const Rat& time, FundamentalDomainMap::Backend backend);

// Synchronized bisequence window n in [-N, N]: increasing values b_n inside
// (0, T) that track an increasing target sequence within the per-index
// tolerance eps_n = min{target_n/|n|, (T-target_n)/|n|, gaps to neighbors}.
class Bisequence {
public:
    Bisequence(const ParabolicAnchor& anchor, std::vector<Rat> targets, std::vector<Rat> values);

    int window() const { return static_cast<int>(targets_.size() / 2); }
    const Rat& domain_length() const { return T_; }
    const Rat& target(int n) const { return targets_.at(static_cast<size_t>(n + window())); }
    const Rat& value(int n) const { return values_.at(static_cast<size_t>(n + window())); }
    const std::vector<Rat>& values() const { return values_; }
    Rat epsilon(int n) const;

    std::optional<int> index_of(const CirclePoint& x) const;  // exact value lookup

    static std::vector<Rat> default_targets(const ParabolicAnchor& anchor, int N);

private:
    Rat T_;
    std::vector<Rat> targets_;
    std::vector<Rat> values_;
};

// Validates candidate values against the targets; throws OutOfWindow naming
// the first offending index.
Bisequence synchronize(const ParabolicAnchor& anchor, const std::vector<Rat>& targets,
                       const std::vector<Rat>& candidates);

struct LipschitzReport {
    double max_derivative;
    double derivative_at_inf;
    int grid_depth;
};

// Finite-difference derivative audit over ell-translates of fundamental
// domain samples. Pre: the map carries the Z1star smoothness tag.
LipschitzReport lipschitz_report(const CommutingHomeo& c, int grid_depth);

}  // namespace folia
