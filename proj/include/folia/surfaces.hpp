#pragma once

#include "folia/errors.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace folia {

// Side labels for tile slots; mirrors the outer/inner split of type-1 leaves.
enum class SlotSide { Outer, Inner };

// Finitely truncated subtree of the binary tree with a {0,1} vertex coloring.
// The root has degree 2 and separates a positive and a negative side; edges
// are oriented from the boundary vertex with the lower signed level.
class ColoredTree {
public:
    struct Vertex {
        int id = 0;
        int level = 0;   // signed
        int parent = -1; // neighbor with smaller |level|; -1 for the root
        int color = 0;
    };

    static ColoredTree from_records(std::vector<Vertex> records, int truncation_depth);
    // Line-based records "id level parent color", one per line; depth is the
    // maximum |level|.
    static ColoredTree parse(const std::string& text);
    std::string serialize() const;

    // Standard encodings.
    static ColoredTree line(int depth, int color);         // bi-infinite line
    static ColoredTree full_binary(int depth, int color);  // Cantor-type tree

    int depth() const { return depth_; }
    const std::vector<Vertex>& vertices() const { return order_; }
    const Vertex& vertex(int id) const;
    bool has_vertex(int id) const { return index_.count(id) != 0; }
    int root_id() const { return root_; }
    std::vector<int> children(int id) const;
    int degree(int id) const;
    bool is_frontier(int id) const;  // |level| == depth
    std::vector<int> frontier() const;

    long ones_in_truncation() const;  // number of 1-colored vertices

    // Canonical encoding of the truncation: children subtrees sorted by their
    // encodings, so relabeled copies of the same tree agree byte for byte.
    std::string canonical_form() const;

private:
    void validate() const;
    std::string canonical_subtree(int id) const;
    std::vector<Vertex> order_;
    std::map<int, Vertex> index_;
    int root_ = -1;
    int depth_ = 0;
};

enum class TileKind { L0, L1, H0, H1, K0, K1 };

const char* tile_name(TileKind k);
inline int tile_genus(TileKind k) { return (k == TileKind::H0 || k == TileKind::H1 || k == TileKind::K1) ? 1 : 0; }
inline bool tile_has_sides(TileKind k) { return k == TileKind::L1 || k == TileKind::H1; }

// Assembled tile surface: tiles indexed by tree vertices (or chain position)
// with slot-level gluing records. Slots carry stable integer identities so
// gluing data replays byte for byte.
class TileComplex {
public:
    struct Slot {
        int id = 0;
        int tile = 0;                       // index into tiles()
        std::optional<SlotSide> side;       // only on L1/H1 tiles
        int glued_to = -1;                  // slot id, -1 when open
        bool compact = false;               // compact boundary circle (K-tiles at the frontier)
    };
    struct Tile {
        int index = 0;
        int vertex = 0;  // tree vertex id, or chain position
        TileKind kind = TileKind::L0;
        std::vector<int> slots;  // slot ids
    };
    struct Gluing {
        int from_slot = 0;
        int to_slot = 0;
        int origin_vertex = 0;
        int target_vertex = 0;
    };

    const std::vector<Tile>& tiles() const { return tiles_; }
    const std::vector<Slot>& slots() const { return slots_; }
    const std::vector<Gluing>& gluings() const { return gluings_; }
    const Slot& slot(int id) const { return slots_.at(static_cast<size_t>(id)); }
    const Tile* tile_of_vertex(int vertex) const;
    bool w_construction() const { return w_construction_; }
    const std::optional<ColoredTree>& tree() const { return tree_; }
    std::optional<long> chain_handles() const { return chain_handles_; }
    int truncation_depth() const { return depth_; }

    // Genus of the truncation: intrinsic tile genus plus the cycle rank of
    // the gluing multigraph.
    long genus() const;
    bool has_compact_boundary() const;
    std::vector<int> open_slots() const;

    friend TileComplex build_S(const ColoredTree& tree);
    friend TileComplex build_W(const ColoredTree& tree);
    friend TileComplex build_chain(std::optional<long> handles, int truncation);

private:
    int new_slot(int tile, std::optional<SlotSide> side, bool compact);
    std::vector<Tile> tiles_;
    std::vector<Slot> slots_;
    std::vector<Gluing> gluings_;
    bool w_construction_ = false;
    std::optional<ColoredTree> tree_;
    std::optional<long> chain_handles_;  // chain encoding: nullopt tree, k >= 0, or -1 for infinite
    int depth_ = 0;
};

// K-tile complex: sphere- or torus-minus-disks per color, one tile per tree
// vertex, glued along tree edges. The truncation frontier keeps compact
// boundary circles (end windows).
TileComplex build_S(const ColoredTree& tree);

// Noncompact-tile complex realizing the tree: root L1/H1, degree-2 vertices
// L0/H0, degree-3 vertices L1/H1, with the outer/inner slot discipline of
// the realization rules. Throws SlotConflict when the discipline is violated.
TileComplex build_W(const ColoredTree& tree);

// One-ended chain encoding: k handle blocks H0 chained behind a seed L0
// (k = 0 is the bare seed; handles = nullopt means the infinite chain,
// truncated at `truncation` blocks).
TileComplex build_chain(std::optional<long> handles, int truncation);

// Truncated end-space encoding with per-cylinder flags.
struct EndDescriptor {
    struct Cylinder {
        int vertex = 0;        // frontier vertex (or chain tail)
        int depth = 0;
        bool perfect = true;   // contains a Cantor set of tile ends
        bool b_dense = true;   // boundary-component ends are dense inside
        bool nonplanar = false;  // 1-colored accumulation within the window
    };
    int depth = 0;
    bool w_construction = false;
    std::vector<Cylinder> cylinders;
    // Equivalence classes of boundary ends under the pairing induced by
    // noncompact boundary components: always size 2 on B ends, 1 elsewhere.
    long b_pair_classes = 0;
    bool cantor_at_every_level = true;

    long nonplanar_cylinders() const;
};

EndDescriptor ends(const TileComplex& complex);

// Topological accessibility along the truncated tree: ends whose crossing
// sequence stays +1 within the window, with the root vertex of the maximal
// accessible geodesic. The root element itself always crosses, so the root
// vertex is the first vertex after the last crossing (the tree root when the
// ray never crosses again).
struct AccessibleEnd {
    int end_vertex = 0;    // frontier vertex
    int root_vertex = 0;   // gamma_e(0)
    std::vector<int> xi_prefix;  // crossing sequence along the ray (interior vertices)
};

std::vector<AccessibleEnd> accessible_ends(const ColoredTree& tree);

// Finite cyclic-order data of the boundary ends clustered at one end, with
// the refinement marks per depth. Inaccessible ends own no boundary ends.
struct BoundaryCircleReport {
    int end_vertex = 0;
    bool accessible = false;
    std::vector<int> slot_ids;        // cyclic order, the end itself at infinity
    std::vector<size_t> depth_marks;  // prefix length per depth (refinement record)
    bool consistent = true;
};

BoundaryCircleReport boundary_circle_quotient(const TileComplex& complex, int end_vertex);

// Assignment of every open boundary slot to the accessible end whose cluster
// contains it; the clusters partition the boundary ends. -1 marks frontier
// leftovers whose walk leaves the truncation window.
std::map<int, int> boundary_partition(const TileComplex& complex);

// Comparable invariants of a surface at a truncation depth. Counts are
// nullopt when infinite (or Cantor, for end counts).
struct SurfaceInvariants {
    std::optional<long> genus;
    std::optional<long> end_count;           // nullopt = Cantor
    std::optional<long> nonplanar_end_count; // nullopt = infinitely many
    long compact_boundary = 0;
    std::optional<std::string> end_tree_canonical;  // canonical truncated end encoding
    bool eventually_periodic = false;  // encoding certified eventually periodic
    int depth = 0;

    std::string str() const;
    static SurfaceInvariants parse(const std::string& text);  // "genus=1 ends=1 nonplanar=0 boundary=0"
};

// Invariants of the nonrecurrent completion: boundary slots absorb half-plane
// cascades, the paired boundary ends merge, genus is preserved.
SurfaceInvariants nonrecurrent_complete(const TileComplex& complex);

enum class HomeoVerdict { Equal, Distinct, UnknownAtDepth };

const char* verdict_name(HomeoVerdict v);

// Classification-based comparison: exact on finite-type data, canonical-form
// comparison on eventually-periodic tree encodings, UnknownAtDepth otherwise.
HomeoVerdict homeomorphic(const SurfaceInvariants& a, const SurfaceInvariants& b);

}  // namespace folia
