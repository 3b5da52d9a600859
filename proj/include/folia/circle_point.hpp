#pragma once

#include "folia/rational.hpp"

#include <utility>
#include <vector>

namespace folia {

// Point of the circle R u {inf}, modeled as the projective line. Finite points
// are exact elements a + b*sqrt(D) of a real quadratic field (D = 0 for plain
// rationals, which is the common case). Perfect-square radicands collapse to
// rationals on construction, so two points are equal iff they compare equal.
class CirclePoint {
public:
    CirclePoint() : inf_(false), a_(0), b_(0), D_(0) {}
    CirclePoint(const Rat& value) : inf_(false), a_(value), b_(0), D_(0) {}
    CirclePoint(long value) : inf_(false), a_(value), b_(0), D_(0) {}
    CirclePoint(const Rat& a, const Rat& b, const Int& D);

    static CirclePoint infinity() {
        CirclePoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinity() const { return inf_; }
    bool is_rational() const { return !inf_ && b_ == 0; }

    const Rat& rational() const;
    const Rat& quad_a() const { return a_; }
    const Rat& quad_b() const { return b_; }
    const Int& quad_d() const { return D_; }

    // Homogeneous coordinates (p, q): gcd-reduced, q > 0, infinity = (1, 0).
    // Only defined for rational points and infinity.
    std::pair<Int, Int> homogeneous() const;

    double approx() const;  // value as double; inf maps to +infinity
    // Angle coordinate in [0, 1): atan(x)/pi + 1/2, with theta(inf) = 0.
    double theta() const;

    bool operator==(const CirclePoint& o) const;
    bool operator!=(const CirclePoint& o) const { return !(*this == o); }

    // Exact order of the finite real values; infinity sorts above everything.
    int compare(const CirclePoint& o) const;
    bool operator<(const CirclePoint& o) const { return compare(o) < 0; }

    std::string str() const;

private:
    bool inf_;
    Rat a_, b_;
    Int D_;
};

// Chordal distance on the circle under the two-chart projective embedding.
double chordal_distance(const CirclePoint& x, const CirclePoint& y);

// True iff b lies strictly inside the counterclockwise open arc from a to c.
// Counterclockwise means increasing real value, wrapping through infinity.
// Requires a != c.
bool in_ccw_arc(const CirclePoint& a, const CirclePoint& b, const CirclePoint& c);

CirclePoint parse_point(const std::string& text);  // "p/q" or "inf"

}  // namespace folia
