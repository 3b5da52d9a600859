#pragma once

#include "folia/action.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace folia {

// Presentation data of one foliated block: the suspended Fuchsian action on
// the circle, cut out of a typical orbifold along a separating loop.
struct OrbifoldSpec {
    Factor side = Factor::Right;
    int genus = 0;  // genus of the compact piece B*
    std::map<std::string, MoebiusMap> generators;
    std::vector<std::pair<std::string, int>> cone_points;  // generator name, cone order
    std::string boundary_word;  // word in generator names, e.g. "p^-1 q^-1 p q"
    bool orientation_flag = true;
};

struct DehnFilling {
    std::string generator;
    int order = 0;
    Rat rotation;  // structure constant of the filled torus
};

class Block {
public:
    static Block build(const OrbifoldSpec& spec);

    const OrbifoldSpec& spec() const { return spec_; }
    Factor side() const { return spec_.side; }
    const MoebiusMap& boundary() const { return boundary_; }
    const CirclePoint& boundary_fixed_point() const { return boundary_fixed_; }
    const std::vector<DehnFilling>& fillings() const { return fillings_; }

    // chi^orb of B* with its elliptic boundaries filled: one parabolic
    // boundary plus the cone corrections.
    Rat orbifold_euler() const;

    MoebiusMap word(const std::string& text) const;  // word in generator names
    std::vector<MoebiusMap> word_letters(const std::string& text) const;
    const std::vector<std::pair<std::string, MoebiusMap>>& sym_letters() const { return letters_; }

    Block conjugated(const MoebiusMap& h) const;  // h G h^-1 with the same bookkeeping

private:
    OrbifoldSpec spec_;
    MoebiusMap boundary_;
    CirclePoint boundary_fixed_ = CirclePoint::infinity();
    std::vector<DehnFilling> fillings_;
    std::vector<std::pair<std::string, MoebiusMap>> letters_;
};

struct LeafType {
    enum class Tag { Type0, Type1, Type2 };
    Tag tag = Tag::Type0;
    int depth = 0;  // every verdict is "up to this depth"
    MoebiusMap generator;  // Type1: a word fixing the point
    std::vector<std::pair<std::string, int>> generator_word;
};

LeafType leaf_type(const Block& block, const CirclePoint& x, int depth);

enum class SideClass { Outer, Inner };

inline const char* side_name(SideClass s) { return s == SideClass::Outer ? "outer" : "inner"; }

// Outer/inner side of the boundary component through the orbit point
// v(root) of the type-1 leaf stabilized by `leaf_generator` (root = its
// attracting fixed point). The component corresponds to the cusp v^-1(inf),
// and its side is the open arc between the attracting and repelling fixed
// points containing that cusp; the block orientation flag fixes which arc
// counts as outer. Exactly invariant under both the ell-action on the
// boundary point and the choice of witness v.
SideClass classify_side(const Block& block, const MoebiusMap& leaf_generator,
                        const MoebiusMap& witness);



struct OnAxis : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundaryPoint {
    CirclePoint point;       // reduced representative in [0, ell(0))
    CirclePoint leaf_root;   // orbit anchor of its leaf
    std::optional<SideClass> side;
    std::vector<std::pair<std::string, int>> reaching_word;
    MoebiusMap witness;      // maps the leaf root to the (honest) boundary point
};

struct BoundaryRequest {
    LeafType::Tag leaf_type = LeafType::Tag::Type1;
    std::optional<SideClass> side;
    std::vector<CirclePoint> exclude_roots;
    // Desk realization mode: return a rational anchor standing for the
    // nearest admissible honest boundary point (whose witness and side are
    // still reported), instead of the exact orbit point itself.
    bool rational_anchor = false;
    std::optional<MoebiusMap> leaf_generator;  // Type1 stabilizer; default: first hyperbolic gen
};

BoundaryPoint find_boundary_point(const Block& block, const ParabolicAnchor& anchor, const Rat& target,
                                  const Rat& eps, const BoundaryRequest& want, int depth);

// Two validated blocks glued along their parabolic boundary tori. The left
// generators are stored already conjugated by the pair normalizer, so the
// shared core is one positive translation.
class BlockPair {
public:
    static BlockPair build(const OrbifoldSpec& right, const OrbifoldSpec& left,
                           const std::optional<MoebiusMap>& sigma = std::nullopt);

    const Block& right() const { return right_; }
    const Block& left() const { return left_; }
    const Block& block(Factor f) const { return f == Factor::Right ? right_ : left_; }
    const ParabolicAnchor& anchor() const { return anchor_; }
    std::shared_ptr<const AmalgamContext> context() const { return ctx_; }

private:
    BlockPair(Block right, Block left, ParabolicAnchor anchor);
    Block right_, left_;
    ParabolicAnchor anchor_;
    std::shared_ptr<const AmalgamContext> ctx_;
};

struct EulerReport {
    Rat chi_right, chi_left;          // exact orbifold Euler characteristics
    Rat rotation_sum_right, rotation_sum_left;
    double boundary_translation_right = 0.0;  // Milnor lift iteration
    double boundary_translation_left = 0.0;
    double side_right = 0.0;  // rotation sum + boundary translation
    double side_left = 0.0;
    Rat total_abs;            // |eu(M(O, sigma))| = |chi_right - chi_left|
    int iterations = 0;
};

EulerReport euler_numbers(const BlockPair& pair, int iterations = 10000);

}  // namespace folia
