#pragma once

#include "folia/circle_point.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace folia {

enum class MapTag { Identity, Elliptic, Parabolic, Hyperbolic };

struct MapClass {
    MapTag tag = MapTag::Identity;
    // Minimal n with m^n projectively trivial, when found within the search bound.
    std::optional<int> elliptic_order;
    // Exact fixed points: parabolic has one, hyperbolic two (attracting first).
    std::vector<CirclePoint> fixed_points;
    // Coefficients of the fixed-point equation c x^2 + (d-a) x - b = 0.
    Int quad_a, quad_b, quad_c;
};

const char* tag_name(MapTag tag);

// Orientation-preserving projective transformation of R u {inf}, stored as a
// gcd-reduced integer matrix with positive determinant. The sign is fixed by
// making the first nonzero entry of (a, b, c, d) positive, so projectively
// equal maps have identical entries and operator== is exact equality.
class MoebiusMap {
public:
    MoebiusMap() : a_(1), b_(0), c_(0), d_(1) {}
    MoebiusMap(const Rat& a, const Rat& b, const Rat& c, const Rat& d);
    MoebiusMap(const Int& a, const Int& b, const Int& c, const Int& d);

    static MoebiusMap identity() { return MoebiusMap(); }
    static MoebiusMap translation(const Rat& t) { return MoebiusMap(Rat(1), t, Rat(0), Rat(1)); }
    // Accepts "[[a,b],[c,d]]" with integer or p/q entries.
    static MoebiusMap parse(const std::string& text);

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    const Int& c() const { return c_; }
    const Int& d() const { return d_; }
    Int det() const { return a_ * d_ - b_ * c_; }

    CirclePoint operator()(const CirclePoint& x) const;
    double apply_real(double x) const;  // real-line chart; inf as HUGE_VAL

    MoebiusMap inverse() const { return MoebiusMap(d_, -b_, -c_, a_); }
    MoebiusMap pow(long k) const;

    bool is_identity() const { return b_ == 0 && c_ == 0 && a_ == d_; }
    bool operator==(const MoebiusMap& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }
    bool operator!=(const MoebiusMap& o) const { return !(*this == o); }
    bool operator<(const MoebiusMap& o) const;  // lexicographic on canonical entries

    std::string str() const;         // "[[a,b],[c,d]]"
    std::string str_fractional() const;  // "(a z + b)/(c z + d)" style

private:
    void canonicalize();
    Int a_, b_, c_, d_;
};

MoebiusMap compose(const MoebiusMap& m1, const MoebiusMap& m2);
CirclePoint apply(const MoebiusMap& m, const CirclePoint& x);

// m1^-1 m2^-1 m1 m2 as a composition of maps.
MoebiusMap commutator(const MoebiusMap& m1, const MoebiusMap& m2);

MoebiusMap conjugate(const MoebiusMap& m, const MoebiusMap& h);  // h m h^-1

MapClass classify(const MoebiusMap& m, int order_bound = 64);

// Rotation number k/n of a finite-order elliptic map (n = order, k = winding
// of the orbit of a base point). Identity gives 0. Returns nothing when no
// power up to order_bound is projectively trivial.
std::optional<Rat> rotation_number(const MoebiusMap& m, int order_bound = 64);

// Birkhoff translation-number estimate of the composed word acting on the
// line R = S^1 minus {inf}, measured in fundamental domains of the parabolic
// deck map (a translation z + t fixing inf): (w^n(x0) - x0) / (t n). The
// orbit is iterated exactly; the error of the estimate is bounded by 1/n.
double translation_number(std::span<const MoebiusMap> word, const MoebiusMap& deck,
                          int iterations, const CirclePoint& start = CirclePoint(0l));

}  // namespace folia
