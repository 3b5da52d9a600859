#include "folia/circle_point.hpp"

#include <cmath>

namespace folia {

CirclePoint::CirclePoint(const Rat& a, const Rat& b, const Int& D)
    : inf_(false), a_(a), b_(b), D_(D) {
    if (D_ < 0) throw std::invalid_argument("CirclePoint: negative radicand");
    if (b_ == 0) {
        D_ = 0;
        return;
    }
    if (mpz_perfect_square_p(D_.get_mpz_t())) {
        Int r;
        mpz_sqrt(r.get_mpz_t(), D_.get_mpz_t());
        a_ += b_ * Rat(r);
        b_ = 0;
        D_ = 0;
    }
}

const Rat& CirclePoint::rational() const {
    if (!is_rational()) throw std::logic_error("CirclePoint: not a finite rational point");
    return a_;
}

std::pair<Int, Int> CirclePoint::homogeneous() const {
    if (inf_) return {Int(1), Int(0)};
    const Rat& r = rational();
    return {r.get_num(), r.get_den()};
}

double CirclePoint::approx() const {
    if (inf_) return std::numeric_limits<double>::infinity();
    double v = a_.get_d();
    if (b_ != 0) v += b_.get_d() * std::sqrt(D_.get_d());
    return v;
}

double CirclePoint::theta() const {
    if (inf_) return 0.0;
    return std::atan(approx()) / M_PI + 0.5;
}

bool CirclePoint::operator==(const CirclePoint& o) const {
    if (inf_ || o.inf_) return inf_ == o.inf_;
    return quad_compare(a_, b_, D_, o.a_, o.b_, o.D_) == 0;
}

int CirclePoint::compare(const CirclePoint& o) const {
    if (inf_ && o.inf_) return 0;
    if (inf_) return 1;
    if (o.inf_) return -1;
    return quad_compare(a_, b_, D_, o.a_, o.b_, o.D_);
}

std::string CirclePoint::str() const {
    if (inf_) return "inf";
    if (is_rational()) return a_.get_str();
    std::string s = a_.get_str();
    s += (sgn(b_) < 0 ? "-" : "+");
    Rat ab = rat_abs(b_);
    if (ab != 1) s += ab.get_str() + "*";
    s += "sqrt(" + D_.get_str() + ")";
    return s;
}

double chordal_distance(const CirclePoint& x, const CirclePoint& y) {
    const double sx = 1.0 / std::sqrt(1.0 + x.approx() * x.approx());
    const double sy = 1.0 / std::sqrt(1.0 + y.approx() * y.approx());
    if (x.is_infinity() && y.is_infinity()) return 0.0;
    if (x.is_infinity()) return sy;
    if (y.is_infinity()) return sx;
    return std::fabs(x.approx() - y.approx()) * sx * sy;
}

bool in_ccw_arc(const CirclePoint& a, const CirclePoint& b, const CirclePoint& c) {
    if (a == c) throw std::invalid_argument("in_ccw_arc: degenerate arc");
    if (b == a || b == c) return false;
    const int ac = a.compare(c);
    if (ac < 0) return a.compare(b) < 0 && b.compare(c) < 0;
    return a.compare(b) < 0 || b.compare(c) < 0;
}

CirclePoint parse_point(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s == "inf" || s == "oo" || s == "infinity") return CirclePoint::infinity();
    return CirclePoint(parse_rational(s));
}

}  // namespace folia
