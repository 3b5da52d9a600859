#include "folia/surfaces.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>

namespace folia {

ColoredTree ColoredTree::from_records(std::vector<Vertex> records, int truncation_depth) {
    ColoredTree t;
    t.order_ = std::move(records);
    t.depth_ = truncation_depth;
    for (const Vertex& v : t.order_) {
        if (!t.index_.emplace(v.id, v).second)
            throw std::invalid_argument("duplicate tree vertex id " + std::to_string(v.id));
        if (v.level == 0) {
            if (t.root_ != -1) throw std::invalid_argument("tree has two roots");
            t.root_ = v.id;
        }
    }
    t.validate();
    return t;
}

void ColoredTree::validate() const {
    if (root_ == -1) throw std::invalid_argument("tree has no level-0 root");
    if (depth_ < 1) throw std::invalid_argument("truncation depth must be positive");
    std::map<int, int> child_count;
    for (const auto& [id, v] : index_) {
        if (v.color != 0 && v.color != 1)
            throw std::invalid_argument("vertex colors must be 0 or 1");
        if (std::abs(v.level) > depth_)
            throw std::invalid_argument("vertex beyond the truncation depth");
        if (v.level == 0) {
            if (v.parent != -1) throw std::invalid_argument("root must have parent -1");
            continue;
        }
        const auto pit = index_.find(v.parent);
        if (pit == index_.end())
            throw std::invalid_argument("vertex " + std::to_string(id) + " has unknown parent");
        const int expected = v.level > 0 ? v.level - 1 : v.level + 1;
        if (pit->second.level != expected)
            throw std::invalid_argument("vertex " + std::to_string(id) + " has mislevelled parent");
        ++child_count[v.parent];
    }
    for (const auto& [id, n] : child_count) {
        const int deg = n + (id == root_ ? 0 : 1);
        if (deg > 3) throw std::invalid_argument("vertex " + std::to_string(id) + " exceeds binary degree");
    }
    if (child_count[root_] != 2)
        throw std::invalid_argument("the root must have exactly two neighbors");
}

ColoredTree ColoredTree::parse(const std::string& text) {
    std::vector<Vertex> records;
    std::istringstream is(text);
    std::string line;
    int depth = 0;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        Vertex v;
        if (!(ls >> v.id >> v.level >> v.parent >> v.color)) continue;
        depth = std::max(depth, std::abs(v.level));
        records.push_back(v);
    }
    if (records.empty()) throw std::invalid_argument("empty tree file");
    return from_records(std::move(records), depth);
}

std::string ColoredTree::serialize() const {
    std::ostringstream os;
    os << "# vertex level parent color\n";
    for (const Vertex& v : order_) os << v.id << " " << v.level << " " << v.parent << " " << v.color << "\n";
    return os.str();
}

ColoredTree ColoredTree::line(int depth, int color) {
    std::vector<Vertex> records;
    for (int k = -depth; k <= depth; ++k) {
        Vertex v;
        v.id = k;
        v.level = k;
        v.parent = k == 0 ? -1 : (k > 0 ? k - 1 : k + 1);
        v.color = color;
        records.push_back(v);
    }
    return from_records(std::move(records), depth);
}

ColoredTree ColoredTree::full_binary(int depth, int color) {
    std::vector<Vertex> records;
    int next_id = 0;
    auto add = [&](int level, int parent) {
        Vertex v;
        v.id = next_id++;
        v.level = level;
        v.parent = parent;
        v.color = color;
        records.push_back(v);
        return v.id;
    };
    const int root = add(0, -1);
    for (const int sign : {1, -1}) {
        std::vector<int> frontier{root};
        for (int d = 1; d <= depth; ++d) {
            std::vector<int> next;
            for (const int parent : frontier) {
                const int kids = d == 1 ? 1 : 2;
                for (int i = 0; i < kids; ++i) next.push_back(add(sign * d, parent));
            }
            frontier = std::move(next);
        }
    }
    return from_records(std::move(records), depth);
}

const ColoredTree::Vertex& ColoredTree::vertex(int id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown tree vertex " + std::to_string(id));
    return it->second;
}

std::vector<int> ColoredTree::children(int id) const {
    std::vector<int> out;
    for (const Vertex& v : order_)
        if (v.parent == id && v.id != root_) out.push_back(v.id);
    std::sort(out.begin(), out.end());
    return out;
}

int ColoredTree::degree(int id) const {
    return static_cast<int>(children(id).size()) + (id == root_ ? 0 : 1);
}

bool ColoredTree::is_frontier(int id) const { return std::abs(vertex(id).level) == depth_; }

std::vector<int> ColoredTree::frontier() const {
    std::vector<int> out;
    for (const Vertex& v : order_)
        if (std::abs(v.level) == depth_) out.push_back(v.id);
    std::sort(out.begin(), out.end());
    return out;
}

long ColoredTree::ones_in_truncation() const {
    long n = 0;
    for (const Vertex& v : order_) n += v.color;
    return n;
}

std::string ColoredTree::canonical_subtree(int id) const {
    std::vector<std::string> kids;
    for (const int c : children(id)) kids.push_back(canonical_subtree(c));
    std::sort(kids.begin(), kids.end());
    std::string out = "(" + std::to_string(vertex(id).color);
    for (const auto& k : kids) out += k;
    out += ")";
    return out;
}

std::string ColoredTree::canonical_form() const {
    const auto kids = children(root_);
    std::vector<std::string> sides;
    for (const int c : kids) sides.push_back(canonical_subtree(c));
    std::sort(sides.begin(), sides.end());
    std::string out = "{" + std::to_string(vertex(root_).color);
    for (const auto& s : sides) out += s;
    out += "}";
    return out;
}

const char* tile_name(TileKind k) {
    switch (k) {
        case TileKind::L0: return "L0";
        case TileKind::L1: return "L1";
        case TileKind::H0: return "H0";
        case TileKind::H1: return "H1";
        case TileKind::K0: return "K0";
        case TileKind::K1: return "K1";
    }
    return "?";
}

int TileComplex::new_slot(int tile, std::optional<SlotSide> side, bool compact) {
    Slot s;
    s.id = static_cast<int>(slots_.size());
    s.tile = tile;
    s.side = side;
    s.compact = compact;
    slots_.push_back(s);
    tiles_[static_cast<size_t>(tile)].slots.push_back(s.id);
    return s.id;
}

const TileComplex::Tile* TileComplex::tile_of_vertex(int vertex) const {
    for (const Tile& t : tiles_)
        if (t.vertex == vertex) return &t;
    return nullptr;
}

long TileComplex::genus() const {
    long g = 0;
    for (const Tile& t : tiles_) g += tile_genus(t.kind);
    // Cycle rank of the gluing multigraph adds one handle per independent cycle.
    std::vector<int> parent(tiles_.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); };
    long cycles = 0;
    for (const Gluing& e : gluings_) {
        const int a = find(slot(e.from_slot).tile), b = find(slot(e.to_slot).tile);
        if (a == b)
            ++cycles;
        else
            parent[static_cast<size_t>(a)] = b;
    }
    return g + cycles;
}

bool TileComplex::has_compact_boundary() const {
    for (const Slot& s : slots_)
        if (s.compact && s.glued_to == -1) return true;
    return false;
}

std::vector<int> TileComplex::open_slots() const {
    std::vector<int> out;
    for (const Slot& s : slots_)
        if (s.glued_to == -1 && !s.compact) out.push_back(s.id);
    return out;
}

namespace {

void check_no_dead_ends(const ColoredTree& tree) {
    for (const auto& v : tree.vertices()) {
        if (tree.is_frontier(v.id)) continue;
        if (tree.degree(v.id) < 2) throw DeadEnd(v.id, "interior vertex " + std::to_string(v.id) + " is a dead end");
    }
}

}  // namespace

TileComplex build_S(const ColoredTree& tree) {
    check_no_dead_ends(tree);
    TileComplex out;
    out.w_construction_ = false;
    out.tree_ = tree;
    out.depth_ = tree.depth();
    std::map<int, int> tile_of;
    for (const auto& v : tree.vertices()) {
        TileComplex::Tile t;
        t.index = static_cast<int>(out.tiles_.size());
        t.vertex = v.id;
        t.kind = v.color ? TileKind::K1 : TileKind::K0;
        out.tiles_.push_back(t);
        tile_of[v.id] = t.index;
    }
    // One compact circle per incident edge; frontier tiles keep an extra open
    // window circle toward the continuation.
    std::map<std::pair<int, int>, int> edge_slot;  // (vertex, neighbor) -> slot
    for (const auto& v : tree.vertices()) {
        const int t = tile_of[v.id];
        if (v.parent != -1) edge_slot[{v.id, v.parent}] = out.new_slot(t, std::nullopt, true);
        for (const int c : tree.children(v.id)) edge_slot[{v.id, c}] = out.new_slot(t, std::nullopt, true);
        if (tree.is_frontier(v.id)) out.new_slot(t, std::nullopt, true);
    }
    for (const auto& v : tree.vertices()) {
        if (v.parent == -1) continue;
        // Edge orientation: origin is the vertex with the lower signed level.
        const int origin = v.level > 0 ? v.parent : v.id;
        const int target = v.level > 0 ? v.id : v.parent;
        const int from = edge_slot[{origin, origin == v.id ? v.parent : v.id}];
        const int to = edge_slot[{target, target == v.id ? v.parent : v.id}];
        out.slots_[static_cast<size_t>(from)].glued_to = to;
        out.slots_[static_cast<size_t>(to)].glued_to = from;
        out.gluings_.push_back({from, to, origin, target});
    }
    return out;
}

TileComplex build_W(const ColoredTree& tree) {
    check_no_dead_ends(tree);
    const int root = tree.root_id();
    {
        const auto kids = tree.children(root);
        if (kids.size() == 2 && tree.vertex(kids[0]).level == tree.vertex(kids[1]).level)
            throw SlotConflict(root, "root must separate a positive and a negative side");
    }
    TileComplex out;
    out.w_construction_ = true;
    out.tree_ = tree;
    out.depth_ = tree.depth();
    std::map<int, int> tile_of;
    for (const auto& v : tree.vertices()) {
        TileComplex::Tile t;
        t.index = static_cast<int>(out.tiles_.size());
        t.vertex = v.id;
        const int deg = tree.degree(v.id);
        if (v.id == root)
            t.kind = v.color ? TileKind::H1 : TileKind::L1;
        else if (deg >= 3)
            t.kind = v.color ? TileKind::H1 : TileKind::L1;
        else
            t.kind = v.color ? TileKind::H0 : TileKind::L0;
        out.tiles_.push_back(t);
        tile_of[v.id] = t.index;
    }
    // Glued slots with the outer/inner discipline, then a pair of free
    // noncompact slots standing for the tile's dense boundary family.
    std::map<std::pair<int, int>, int> edge_slot;
    for (const auto& v : tree.vertices()) {
        const int t = tile_of[v.id];
        const TileKind kind = out.tiles_[static_cast<size_t>(t)].kind;
        const bool sided = tile_has_sides(kind);
        std::vector<int> kids = tree.children(v.id);
        if (v.id == root) {
            // Spec rule: the positive edge leaves through an outer slot, the
            // negative edge arrives into an inner slot.
            for (const int c : kids) {
                const bool positive = tree.vertex(c).level > 0;
                edge_slot[{v.id, c}] =
                    out.new_slot(t, sided ? std::optional(positive ? SlotSide::Outer : SlotSide::Inner)
                                          : std::nullopt,
                                 false);
            }
        } else {
            if (v.parent != -1) {
                // Single cross-role slot; fixed by convention (inner on the
                // positive side, outer on the negative side).
                std::optional<SlotSide> side;
                if (sided) side = v.level > 0 ? SlotSide::Inner : SlotSide::Outer;
                edge_slot[{v.id, v.parent}] = out.new_slot(t, side, false);
            }
            if (kids.size() > 2) throw SlotConflict(v.id, "more than two deeper slots at one vertex");
            for (size_t i = 0; i < kids.size(); ++i) {
                std::optional<SlotSide> side;
                if (sided) {
                    // Two same-role slots must split outer/inner; a single one
                    // continues the entry side convention of the tile.
                    if (kids.size() == 2)
                        side = i == 0 ? SlotSide::Outer : SlotSide::Inner;
                    else
                        side = v.level > 0 ? SlotSide::Inner : SlotSide::Outer;
                }
                edge_slot[{v.id, kids[i]}] = out.new_slot(t, side, false);
            }
        }
        if (sided) {
            out.new_slot(t, SlotSide::Outer, false);
            out.new_slot(t, SlotSide::Inner, false);
        } else {
            out.new_slot(t, std::nullopt, false);
            out.new_slot(t, std::nullopt, false);
        }
    }
    for (const auto& v : tree.vertices()) {
        if (v.parent == -1) continue;
        const int origin = v.level > 0 ? v.parent : v.id;
        const int target = v.level > 0 ? v.id : v.parent;
        const int from = edge_slot[{origin, origin == v.id ? v.parent : v.id}];
        const int to = edge_slot[{target, target == v.id ? v.parent : v.id}];
        out.slots_[static_cast<size_t>(from)].glued_to = to;
        out.slots_[static_cast<size_t>(to)].glued_to = from;
        out.gluings_.push_back({from, to, origin, target});
    }
    return out;
}

TileComplex build_chain(std::optional<long> handles, int truncation) {
    if (handles && *handles < 0) throw std::invalid_argument("negative handle count");
    const long blocks = handles ? *handles : truncation;
    TileComplex out;
    out.w_construction_ = true;
    out.chain_handles_ = handles ? *handles : -1;
    out.depth_ = truncation;
    auto add_tile = [&](TileKind kind, int vertex) {
        TileComplex::Tile t;
        t.index = static_cast<int>(out.tiles_.size());
        t.vertex = vertex;
        t.kind = kind;
        out.tiles_.push_back(t);
        return t.index;
    };
    auto glue = [&](int a, int b, int va, int vb) {
        out.slots_[static_cast<size_t>(a)].glued_to = b;
        out.slots_[static_cast<size_t>(b)].glued_to = a;
        out.gluings_.push_back({a, b, va, vb});
    };
    // Seed leaf of type 0; each handle block is an L0/L1 pair glued along an
    // outer and an inner boundary, bridged to the previous block.
    const int seed = add_tile(TileKind::L0, 0);
    out.new_slot(seed, std::nullopt, false);
    out.new_slot(seed, std::nullopt, false);
    int prev = seed;
    for (long i = 0; i < blocks; ++i) {
        const int l1 = add_tile(TileKind::L1, static_cast<int>(2 * i + 1));
        const int l0 = add_tile(TileKind::L0, static_cast<int>(2 * i + 2));
        const int bridge_from = out.new_slot(prev, std::nullopt, false);
        const int bridge_to = out.new_slot(l1, SlotSide::Outer, false);
        glue(bridge_from, bridge_to, out.tiles_[static_cast<size_t>(prev)].vertex,
             out.tiles_[static_cast<size_t>(l1)].vertex);
        const int up_out = out.new_slot(l1, SlotSide::Outer, false);
        const int up_in = out.new_slot(l1, SlotSide::Inner, false);
        const int down_a = out.new_slot(l0, std::nullopt, false);
        const int down_b = out.new_slot(l0, std::nullopt, false);
        glue(up_out, down_a, out.tiles_[static_cast<size_t>(l1)].vertex,
             out.tiles_[static_cast<size_t>(l0)].vertex);
        glue(up_in, down_b, out.tiles_[static_cast<size_t>(l1)].vertex,
             out.tiles_[static_cast<size_t>(l0)].vertex);
        out.new_slot(l1, SlotSide::Inner, false);
        out.new_slot(l0, std::nullopt, false);
        prev = l0;
    }
    return out;
}

long EndDescriptor::nonplanar_cylinders() const {
    long n = 0;
    for (const auto& c : cylinders) n += c.nonplanar;
    return n;
}

EndDescriptor ends(const TileComplex& complex) {
    EndDescriptor out;
    out.depth = complex.truncation_depth();
    out.w_construction = complex.w_construction();
    out.b_pair_classes = static_cast<long>(complex.open_slots().size());
    if (complex.chain_handles()) {
        EndDescriptor::Cylinder tail;
        tail.vertex = complex.tiles().empty() ? 0 : complex.tiles().back().vertex;
        tail.depth = out.depth;
        tail.perfect = true;
        tail.b_dense = true;
        tail.nonplanar = *complex.chain_handles() < 0;  // infinite chains accumulate genus
        out.cylinders.push_back(tail);
        out.cantor_at_every_level = true;
        return out;
    }
    const ColoredTree& tree = *complex.tree();
    for (const int f : tree.frontier()) {
        EndDescriptor::Cylinder c;
        c.vertex = f;
        c.depth = std::abs(tree.vertex(f).level);
        c.perfect = complex.w_construction();
        c.b_dense = complex.w_construction();
        c.nonplanar = tree.vertex(f).color == 1;
        out.cylinders.push_back(c);
    }
    out.cantor_at_every_level = complex.w_construction();
    return out;
}

std::vector<AccessibleEnd> accessible_ends(const ColoredTree& tree) {
    const TileComplex complex = build_W(tree);
    std::vector<AccessibleEnd> out;
    for (const int f : tree.frontier()) {
        // Path from the root to the frontier vertex.
        std::vector<int> path;
        for (int v = f; v != -1; v = tree.vertex(v).parent) path.push_back(v);
        std::reverse(path.begin(), path.end());
        AccessibleEnd entry;
        entry.end_vertex = f;
        int last_crossing = -1;  // index into path
        for (size_t i = 1; i + 1 < path.size(); ++i) {
            const int v = path[i];
            const TileComplex::Tile* tile = complex.tile_of_vertex(v);
            int xi = 1;
            if (tile_has_sides(tile->kind)) {
                auto side_toward = [&](int neighbor) -> std::optional<SlotSide> {
                    for (const int sid : tile->slots) {
                        const auto& s = complex.slot(sid);
                        if (s.glued_to == -1) continue;
                        const auto& partner = complex.slot(s.glued_to);
                        if (complex.tiles()[static_cast<size_t>(partner.tile)].vertex == neighbor)
                            return s.side;
                    }
                    return std::nullopt;
                };
                const auto entry_side = side_toward(path[i - 1]);
                const auto exit_side = side_toward(path[i + 1]);
                if (entry_side && exit_side && *entry_side != *exit_side) xi = -1;
            }
            entry.xi_prefix.push_back(xi);
            if (xi == -1) last_crossing = static_cast<int>(i);
        }
        // Accessible within the window when no crossing appears in the deep
        // half of the ray; the maximal geodesic starts after the last
        // crossing (at the root itself when the ray never crosses).
        const int n = static_cast<int>(path.size());
        if (last_crossing > n / 2) continue;
        entry.root_vertex = last_crossing == -1 ? tree.root_id() : path[static_cast<size_t>(last_crossing) + 1];
        out.push_back(entry);
    }
    return out;
}

namespace {

// Walks a boundary slot outward: through the deeper neighbor on the slot's
// side for sided tiles (the separating loop of the tile cannot be crossed),
// through the unique deeper neighbor otherwise. Returns the frontier vertex
// or -1 when the walk leaves the truncation window.
int walk_slot_to_end(const TileComplex& complex, const ColoredTree& tree, int slot_id) {
    int vertex = complex.tiles()[static_cast<size_t>(complex.slot(slot_id).tile)].vertex;
    std::optional<SlotSide> side = complex.slot(slot_id).side;
    for (;;) {
        if (tree.is_frontier(vertex)) return vertex;
        const TileComplex::Tile* tile = complex.tile_of_vertex(vertex);
        const int level = tree.vertex(vertex).level;
        int next = -1;
        int next_slot = -1;
        for (const int sid : tile->slots) {
            const auto& s = complex.slot(sid);
            if (s.glued_to == -1) continue;
            const auto& partner = complex.slot(s.glued_to);
            const int neighbor = complex.tiles()[static_cast<size_t>(partner.tile)].vertex;
            if (std::abs(tree.vertex(neighbor).level) != std::abs(level) + 1) continue;
            if (tile_has_sides(tile->kind) && side && s.side != side) continue;
            next = neighbor;
            next_slot = s.glued_to;
            break;
        }
        if (next == -1) return -1;
        vertex = next;
        side = complex.slot(next_slot).side;
    }
}

}  // namespace

std::map<int, int> boundary_partition(const TileComplex& complex) {
    std::map<int, int> out;
    if (complex.chain_handles()) {
        const int tail = complex.tiles().empty() ? 0 : complex.tiles().back().vertex;
        for (const int sid : complex.open_slots()) out[sid] = tail;
        return out;
    }
    const ColoredTree& tree = *complex.tree();
    for (const int sid : complex.open_slots()) out[sid] = walk_slot_to_end(complex, tree, sid);
    return out;
}

BoundaryCircleReport boundary_circle_quotient(const TileComplex& complex, int end_vertex) {
    BoundaryCircleReport report;
    report.end_vertex = end_vertex;
    if (complex.chain_handles()) {
        report.accessible = true;
        for (const auto& tile : complex.tiles()) {
            for (const int sid : tile.slots)
                if (complex.slot(sid).glued_to == -1) report.slot_ids.push_back(sid);
            report.depth_marks.push_back(report.slot_ids.size());
        }
        report.consistent = true;
        return report;
    }
    const ColoredTree& tree = *complex.tree();
    const auto accessible = accessible_ends(tree);
    const AccessibleEnd* found = nullptr;
    for (const auto& e : accessible)
        if (e.end_vertex == end_vertex) found = &e;
    if (!found) {
        report.accessible = false;
        return report;
    }
    report.accessible = true;
    // Collect the open slots whose walk lands on this end, ordered by the
    // depth at which their tile sits along the ray; the per-depth prefix
    // sizes record the refinement of the cyclic order.
    const auto partition = boundary_partition(complex);
    std::vector<int> path;
    for (int v = end_vertex; v != -1; v = tree.vertex(v).parent) path.push_back(v);
    std::reverse(path.begin(), path.end());
    std::map<int, int> depth_on_ray;
    for (size_t i = 0; i < path.size(); ++i) depth_on_ray[path[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> staged;  // (ray depth, slot id)
    for (const auto& [sid, end] : partition) {
        if (end != end_vertex) continue;
        const int v = complex.tiles()[static_cast<size_t>(complex.slot(sid).tile)].vertex;
        const auto it = depth_on_ray.find(v);
        const int d = it != depth_on_ray.end() ? it->second : static_cast<int>(path.size());
        staged.emplace_back(d, sid);
    }
    std::sort(staged.begin(), staged.end());
    int mark_depth = 0;
    for (const auto& [d, sid] : staged) {
        while (mark_depth < d) {
            report.depth_marks.push_back(report.slot_ids.size());
            ++mark_depth;
        }
        report.slot_ids.push_back(sid);
    }
    report.depth_marks.push_back(report.slot_ids.size());
    // Refinement consistency: each level's list is a prefix of the next.
    for (size_t i = 0; i + 1 < report.depth_marks.size(); ++i)
        if (report.depth_marks[i] > report.depth_marks[i + 1]) report.consistent = false;
    return report;
}

namespace {

struct PeriodicCertificate {
    bool certified = false;
    std::optional<long> genus;
    std::optional<long> end_count;
    std::optional<long> nonplanar;
};

// Chain trees (every vertex of degree <= 2): two ends; the tail color
// pattern certifies the genus class and end flags when it is periodic within
// the window.
std::optional<PeriodicCertificate> certify_chain_tree(const ColoredTree& tree) {
    for (const auto& v : tree.vertices()) {
        if (v.id == tree.root_id()) continue;  // the root always has its two ray directions
        if (static_cast<int>(tree.children(v.id).size()) > 1) return std::nullopt;
    }
    PeriodicCertificate cert;
    cert.certified = true;
    cert.end_count = 2;
    long nonplanar = 0;
    bool infinite_genus = false;
    for (const int f : tree.frontier()) {
        // Tail colors along the ray to this frontier vertex.
        std::vector<int> ray;
        for (int v = f; v != -1; v = tree.vertex(v).parent) ray.push_back(tree.vertex(v).color);
        const size_t tail = std::min<size_t>(ray.size(), std::max<size_t>(3, ray.size() / 2));
        bool ones = false;
        for (size_t i = 0; i < tail; ++i) ones = ones || ray[i] == 1;
        if (ones) {
            ++nonplanar;
            infinite_genus = true;
        }
    }
    cert.nonplanar = nonplanar;
    if (infinite_genus)
        cert.genus = std::nullopt;
    else
        cert.genus = tree.ones_in_truncation();
    return cert;
}

// Uniform full binary trees with a constant color certify the Cantor-type
// classification.
std::optional<PeriodicCertificate> certify_uniform_binary(const ColoredTree& tree) {
    const int color = tree.vertex(tree.root_id()).color;
    for (const auto& v : tree.vertices()) {
        if (v.color != color) return std::nullopt;
        if (tree.is_frontier(v.id)) continue;
        if (static_cast<int>(tree.children(v.id).size()) != 2) return std::nullopt;
    }
    PeriodicCertificate cert;
    cert.certified = true;
    cert.end_count = std::nullopt;  // Cantor
    if (color == 0) {
        cert.genus = 0;
        cert.nonplanar = 0;
    } else {
        cert.genus = std::nullopt;
        cert.nonplanar = std::nullopt;  // every end is nonplanar
    }
    return cert;
}

}  // namespace

std::string SurfaceInvariants::str() const {
    std::ostringstream os;
    os << "genus=" << (genus ? std::to_string(*genus) : "inf");
    os << " ends=" << (end_count ? std::to_string(*end_count) : "cantor");
    os << " nonplanar=" << (nonplanar_end_count ? std::to_string(*nonplanar_end_count) : "inf");
    os << " boundary=" << compact_boundary;
    os << " depth=" << depth;
    os << " periodic=" << (eventually_periodic ? 1 : 0);
    return os.str();
}

SurfaceInvariants SurfaceInvariants::parse(const std::string& text) {
    SurfaceInvariants out;
    out.eventually_periodic = true;
    std::istringstream is(text);
    std::string token;
    auto value_of = [](const std::string& tok) -> std::optional<long> {
        if (tok == "inf" || tok == "cantor") return std::nullopt;
        return std::stol(tok);
    };
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad invariant token: " + token);
        const std::string key = token.substr(0, eq), val = token.substr(eq + 1);
        if (key == "genus")
            out.genus = value_of(val);
        else if (key == "ends")
            out.end_count = value_of(val);
        else if (key == "nonplanar")
            out.nonplanar_end_count = value_of(val);
        else if (key == "boundary")
            out.compact_boundary = std::stol(val);
        else if (key == "depth")
            out.depth = std::stoi(val);
        else if (key == "periodic")
            out.eventually_periodic = val != "0";
        else
            throw std::invalid_argument("unknown invariant key: " + key);
    }
    return out;
}

SurfaceInvariants nonrecurrent_complete(const TileComplex& complex) {
    if (complex.has_compact_boundary())
        throw CompactBoundaryPresent("complex has compact boundary slots; fillings apply to noncompact ones");
    SurfaceInvariants out;
    out.depth = complex.truncation_depth();
    if (complex.chain_handles()) {
        const long k = *complex.chain_handles();
        out.end_count = 1;
        out.eventually_periodic = true;
        if (k < 0) {
            out.genus = std::nullopt;
            out.nonplanar_end_count = std::nullopt;  // the single end is nonplanar
        } else {
            out.genus = k;
            out.nonplanar_end_count = 0;
        }
        out.end_tree_canonical = std::string("chain:") + (k < 0 ? "inf" : std::to_string(k));
        return out;
    }
    const ColoredTree& tree = *complex.tree();
    out.end_tree_canonical = tree.canonical_form();
    if (const auto chain = certify_chain_tree(tree)) {
        out.eventually_periodic = true;
        out.genus = chain->genus;
        out.end_count = chain->end_count;
        out.nonplanar_end_count = chain->nonplanar;
        return out;
    }
    if (const auto binary = certify_uniform_binary(tree)) {
        out.eventually_periodic = true;
        out.genus = binary->genus;
        out.end_count = binary->end_count;
        out.nonplanar_end_count = binary->nonplanar;
        return out;
    }
    out.eventually_periodic = false;
    out.genus = complex.genus();  // truncation value, not certified
    out.end_count = static_cast<long>(tree.frontier().size());
    const EndDescriptor desc = ends(complex);
    out.nonplanar_end_count = desc.nonplanar_cylinders();
    return out;
}

const char* verdict_name(HomeoVerdict v) {
    switch (v) {
        case HomeoVerdict::Equal: return "Equal";
        case HomeoVerdict::Distinct: return "Distinct";
        case HomeoVerdict::UnknownAtDepth: return "UnknownAtDepth";
    }
    return "?";
}

HomeoVerdict homeomorphic(const SurfaceInvariants& a, const SurfaceInvariants& b) {
    if (!a.eventually_periodic || !b.eventually_periodic) return HomeoVerdict::UnknownAtDepth;
    const bool same = a.genus == b.genus && a.end_count == b.end_count &&
                      a.nonplanar_end_count == b.nonplanar_end_count &&
                      a.compact_boundary == b.compact_boundary;
    return same ? HomeoVerdict::Equal : HomeoVerdict::Distinct;
}

}  // namespace folia
