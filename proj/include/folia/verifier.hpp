#pragma once

#include "folia/blocks.hpp"
#include "folia/surfaces.hpp"

namespace folia {

// Target surface for the realization pipeline: a finite-type record, a
// colored tree, or the one-ended handle chain (k = nullopt is the infinite
// chain, truncated at plan depth).
struct TargetSurface {
    enum class Kind { FiniteType, Tree, Chain };
    Kind kind = Kind::Chain;
    std::string name;
    SurfaceInvariants finite;
    std::optional<ColoredTree> tree;
    std::optional<long> chain_handles;

    static TargetSurface plane();
    static TargetSurface chain(std::optional<long> handles, const std::string& name);
    static TargetSurface from_tree(ColoredTree tree, const std::string& name);
    static TargetSurface finite_type(const SurfaceInvariants& inv, const std::string& name);

    SurfaceInvariants predicted_invariants(int depth) const;
    std::optional<long> predicted_genus(int depth) const;
};

// A grid relation: a short factor word whose projective action links two
// stored values exactly, ell-reduced onto the fundamental domain.
struct GridRelation {
    Factor side = Factor::Right;
    int from_index = 0;
    int to_index = 0;
    std::vector<WitnessLetter> word;
    Int k;  // image = ell^-k(value at to_index)
};

// One handle pairing: both sides of an index pair are related, which closes
// a predefined cycle and contributes one handle to the leaf.
struct HandlePairing {
    int construction_step = 0;    // tree vertex id or chain block number
    int a_from = 0, a_to = 0;     // a-grid indexes of the right relation
    int b_from = 0, b_to = 0;     // b-grid indexes of the left relation
    GridRelation right, left;
    NormalForm cycle;             // cycle at b_{b_from}
    NormalForm cycle_at_root;     // conjugated into Stab(b_root)
    std::optional<SideClass> outer_label, inner_label;  // bookkeeping of the requests
};

// Compiled realization data: synchronized grids, relations, predefined cycle
// words, and the induction bookkeeping (which indexes realize which tile).
struct RealizationPlan {
    TargetSurface target;
    int window = 0;
    int depth = 0;
    int root_index = 0;
    std::vector<Rat> targets;
    std::vector<Rat> a_values, b_values;
    std::vector<GridRelation> relations;  // all grid relations, pairing or bridge
    std::vector<HandlePairing> pairings;
    std::vector<std::pair<int, std::vector<int>>> index_partition;  // step -> owned indexes
    std::vector<int> used_indexes;

    long predicted_genus() const { return static_cast<long>(pairings.size()); }
};

// Constructive selection of anchors and relation words near the synchronized
// targets. Throws NotFoundAtDepth (with the failing step recorded in the
// message) when a window admits no admissible partner.
RealizationPlan compile_plan(const BlockPair& blocks, const TargetSurface& target, int window,
                             int depth);

// Interleaves several plans into one bisequence through the row-preserving
// bijection xi(n, k) = k * rows + n.
RealizationPlan interleave_plans(const BlockPair& blocks, const std::vector<RealizationPlan>& plans,
                                 int window);

// Builds the glued action for a plan: c interpolates (a, b), d interpolates
// (b, b), both with deterministic generic interior knots.
GluedAction assemble_action(const BlockPair& blocks, const RealizationPlan& plan,
                            FundamentalDomainMap::Backend backend, unsigned seed);

struct LeafReport {
    enum class Verdict { EqualAtDepth, Distinct, Inconclusive };

    std::string target_name;
    int radius = 0;
    int length_bound = 0;
    int root_index = 0;
    long predicted_genus = 0;
    long certified_genus = 0;
    size_t orbit_points = 0;
    size_t boundary_components = 0;       // ell-orbit classes met by the orbit ball
    std::vector<NormalForm> certified_words;
    std::vector<NormalForm> numerical_fixes;
    bool detected_equals_predicted = false;
    HomeoVerdict codec_verdict = HomeoVerdict::UnknownAtDepth;
    SurfaceInvariants predicted_invariants;
    int perturb_rounds = 0;
    Verdict verdict = Verdict::Inconclusive;

    std::string str() const;
};

const char* verdict_name(LeafReport::Verdict v);

// Orbit reconstruction at bounded radius: certified predefined cycles give
// the genus; any uncertified numerical fix downgrades the verdict.
LeafReport reconstruct_leaf(const GluedAction& action, const RealizationPlan& plan, int radius,
                            int length_bound);

// reconstruct_leaf plus up to `max_rounds` perturbation rounds killing
// uncertified fixers before the final verdict.
LeafReport reconstruct_with_perturbation(GluedAction& action, const RealizationPlan& plan, int radius,
                                         int length_bound, int max_rounds);

struct CoexistenceReport {
    std::vector<LeafReport> reports;
    bool isolation_ok = true;  // no certified cycle mixes bisequence rows
    RealizationPlan combined;
};

CoexistenceReport coexistence_run(const BlockPair& blocks, const std::vector<TargetSurface>& targets,
                                  int window, int depth, int radius, int length_bound,
                                  FundamentalDomainMap::Backend backend, unsigned seed);

}  // namespace folia
