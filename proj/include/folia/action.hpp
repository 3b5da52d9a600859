#pragma once

#include "folia/amalgam.hpp"

#include <map>
#include <memory>

namespace folia {

// The glued circle action rho_{c,d}: right-factor elements act as c g c^-1,
// left-factor elements as d^-1 g d. Well defined on the amalgam because both
// c and d commute with ell. Immutable after construction.
class GluedAction {
public:
    GluedAction(std::shared_ptr<const AmalgamContext> ctx, CommutingHomeo c, CommutingHomeo d,
                Bisequence a, Bisequence b, std::optional<Bisequence> c_seq = std::nullopt,
                double tol = 1e-9);

    const AmalgamContext& context() const { return *ctx_; }
    std::shared_ptr<const AmalgamContext> context_ptr() const { return ctx_; }
    const CommutingHomeo& c() const { return c_; }
    const CommutingHomeo& d() const { return d_; }
    const Bisequence& a_seq() const { return a_; }
    const Bisequence& b_seq() const { return b_; }
    const Bisequence& d_image_seq() const { return c_seq_ ? *c_seq_ : b_; }
    const ParabolicAnchor& anchor() const { return ctx_->anchor(); }
    double tol() const { return tol_; }
    bool exact() const { return c_.exact() && d_.exact(); }

    GluedAction with_maps(CommutingHomeo c, CommutingHomeo d) const;

private:
    std::shared_ptr<const AmalgamContext> ctx_;
    CommutingHomeo c_, d_;
    Bisequence a_, b_;
    std::optional<Bisequence> c_seq_;
    double tol_;
};

// Generator letter of the symmetric alphabet (exp is +1 or -1); core letters
// stand for ell itself.
struct Letter {
    Factor side = Factor::Right;
    bool core = false;
    std::string name;
    int exp = 1;

    std::string str() const;
    bool inverse_of(const Letter& o) const {
        return core == o.core && side == o.side && name == o.name && exp == -o.exp;
    }
};

std::vector<Letter> symmetric_letters(const GluedAction& action, bool include_core);
AmalgamWord letters_to_word(const AmalgamContext& ctx, const std::vector<Letter>& letters);

// rho(letter)^{sign} applied exactly; sign -1 gives the inverse map.
CirclePoint apply_letter(const GluedAction& action, const Letter& letter, const CirclePoint& x,
                         int sign = 1);
double apply_letter_real(const GluedAction& action, const Letter& letter, double x, int sign = 1);

// Exact evaluation of rho(w)(x), syllable by syllable.
CirclePoint evaluate(const GluedAction& action, const AmalgamWord& w, const CirclePoint& x);
double evaluate_real(const GluedAction& action, const AmalgamWord& w, double x);

// Schreier-graph ball of radius R around x, deduplicated by exact equality.
struct OrbitGraph {
    struct Node {
        CirclePoint point;
        int depth = 0;
        int parent = -1;     // index into nodes; -1 at the root
        Letter edge;         // label from parent to this node
    };
    CirclePoint root;
    int radius = 0;
    std::vector<Node> nodes;

    // Largest chordal gap between circularly consecutive orbit points.
    double max_circular_gap() const;
    // Largest gap measured in the angle coordinate (fraction of the circle).
    double max_theta_gap() const;
};

OrbitGraph orbit(const GluedAction& action, const CirclePoint& x, int radius,
                 const std::vector<Letter>& gens);

// A stabilizer word certified by walking its cycle on the bisequence grid.
// Every intermediate reduced coordinate is a stored b-value, so the cycle is
// exact and independent of the interpolants through the control points.
struct PredefinedCycle {
    NormalForm word;
    int root_index = 0;
    std::vector<CirclePoint> points;  // x_0 .. x_n with x_0 = x_n = b_m
    std::vector<Int> ks;              // reduction exponent of each x_i, i >= 1
    std::vector<int> b_indices;       // grid index of each reduced x_i, i >= 1
};

std::optional<PredefinedCycle> detect_predefined_cycle(const GluedAction& action, const NormalForm& w,
                                                       int root_index);

enum class FixClass { Predefined, NumericalFix, Free };

struct StabilizerEntry {
    NormalForm word;
    std::vector<Letter> letters;
    CirclePoint root;
    double displacement = 0.0;  // chordal
    bool exact_fix = false;
    FixClass cls = FixClass::Free;
    std::optional<PredefinedCycle> certificate;
};

struct StabilizerReport {
    CirclePoint root;
    int length_bound = 0;
    size_t words_enumerated = 0;
    std::vector<StabilizerEntry> fixers;   // nontrivial Predefined / NumericalFix entries
    double min_free_displacement = 0.0;    // smallest displacement among displaced words
    bool all_free_exactly_nonzero = true;  // PL path: displaced words are exactly displaced
};

StabilizerReport stabilizer_search(const GluedAction& action, const CirclePoint& x, int length_bound,
                                   double tol, bool include_core_letters = true);

struct SpecialPointViolation {
    std::vector<Letter> letters;
    int b_index = 0;
    CirclePoint image;
};

// Checks that no word of letter length <= L maps a stored b-value to 0 or inf.
std::vector<SpecialPointViolation> avoid_special_points_audit(const GluedAction& action, int length_bound);

// Displaces a non-predefined fixer by composing c or d with a bump supported
// near the last off-grid cycle point, away from every stored control point.
GluedAction perturb_to_kill(const GluedAction& action, const StabilizerEntry& offender);

// True when the bare matrix orbit of x (both factors plus ell, to the given
// depth) avoids 0 and inf. Bisequence values are required to satisfy this.
bool avoids_special_orbits(const AmalgamContext& ctx, const CirclePoint& x, int depth);

// In-window deterministic jitter of the targets into values whose bare factor
// orbits avoid 0 and inf to the given depth.
std::vector<Rat> generic_values(const AmalgamContext& ctx, const std::vector<Rat>& targets,
                                int depth, unsigned seed);

}  // namespace folia
