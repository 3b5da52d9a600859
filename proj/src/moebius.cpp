#include "folia/moebius.hpp"

#include <cmath>
#include <sstream>

namespace folia {

const char* tag_name(MapTag tag) {
    switch (tag) {
        case MapTag::Identity: return "identity";
        case MapTag::Elliptic: return "elliptic";
        case MapTag::Parabolic: return "parabolic";
        case MapTag::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

MoebiusMap::MoebiusMap(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
    Int lcm = a.get_den();
    for (const Rat* r : {&b, &c, &d}) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), r->get_den().get_mpz_t());
    a_ = Rat(a * lcm).get_num();
    b_ = Rat(b * lcm).get_num();
    c_ = Rat(c * lcm).get_num();
    d_ = Rat(d * lcm).get_num();
    canonicalize();
}

MoebiusMap::MoebiusMap(const Int& a, const Int& b, const Int& c, const Int& d)
    : a_(a), b_(b), c_(c), d_(d) {
    canonicalize();
}

void MoebiusMap::canonicalize() {
    if (det() <= 0) throw std::invalid_argument("MoebiusMap: determinant must be positive");
    Int g = gcd(gcd(a_, b_), gcd(c_, d_));
    a_ /= g; b_ /= g; c_ /= g; d_ /= g;
    for (const Int* e : {&a_, &b_, &c_, &d_}) {
        if (*e == 0) continue;
        if (*e < 0) { a_ = -a_; b_ = -b_; c_ = -c_; d_ = -d_; }
        break;
    }
}

MoebiusMap MoebiusMap::parse(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.size() < 9 || s.substr(0, 2) != "[[" || s.substr(s.size() - 2) != "]]")
        throw std::invalid_argument("matrix literal must look like [[a,b],[c,d]]: " + text);
    const auto mid = s.find("],[");
    if (mid == std::string::npos)
        throw std::invalid_argument("matrix literal must look like [[a,b],[c,d]]: " + text);
    auto split_row = [&](const std::string& row) {
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
            throw std::invalid_argument("matrix row must have two entries: " + row);
        return std::pair<Rat, Rat>(parse_rational(row.substr(0, comma)),
                                   parse_rational(row.substr(comma + 1)));
    };
    auto [a, b] = split_row(s.substr(2, mid - 2));
    auto [c, d] = split_row(s.substr(mid + 3, s.size() - 2 - (mid + 3)));
    return MoebiusMap(a, b, c, d);
}

CirclePoint MoebiusMap::operator()(const CirclePoint& x) const {
    if (x.is_infinity()) {
        if (c_ == 0) return CirclePoint::infinity();
        return CirclePoint(Rat(a_) / Rat(c_));
    }
    // Numerator and denominator live in the same quadratic field as x.
    const Rat nu = Rat(a_) * x.quad_a() + Rat(b_);
    const Rat nv = Rat(a_) * x.quad_b();
    const Rat du = Rat(c_) * x.quad_a() + Rat(d_);
    const Rat dv = Rat(c_) * x.quad_b();
    const Int& D = x.quad_d();
    const Rat norm = du * du - dv * dv * Rat(D);
    if (norm == 0) return CirclePoint::infinity();  // x is the pole (D nonsquare by normalization)
    return CirclePoint((nu * du - nv * dv * Rat(D)) / norm, (nv * du - nu * dv) / norm, D);
}

double MoebiusMap::apply_real(double x) const {
    const double a = a_.get_d(), b = b_.get_d(), c = c_.get_d(), d = d_.get_d();
    if (std::isinf(x)) return c == 0 ? HUGE_VAL : a / c;
    const double den = c * x + d;
    if (den == 0) return HUGE_VAL;
    return (a * x + b) / den;
}

MoebiusMap MoebiusMap::pow(long k) const {
    MoebiusMap base = k >= 0 ? *this : inverse();
    unsigned long e = k >= 0 ? static_cast<unsigned long>(k) : static_cast<unsigned long>(-k);
    MoebiusMap acc;
    while (e) {
        if (e & 1) acc = compose(acc, base);
        base = compose(base, base);
        e >>= 1;
    }
    return acc;
}

bool MoebiusMap::operator<(const MoebiusMap& o) const {
    if (a_ != o.a_) return a_ < o.a_;
    if (b_ != o.b_) return b_ < o.b_;
    if (c_ != o.c_) return c_ < o.c_;
    return d_ < o.d_;
}

std::string MoebiusMap::str() const {
    return "[[" + a_.get_str() + "," + b_.get_str() + "],[" + c_.get_str() + "," + d_.get_str() + "]]";
}

std::string MoebiusMap::str_fractional() const {
    std::ostringstream os;
    os << "(" << a_ << "z+" << b_ << ")/(" << c_ << "z+" << d_ << ")";
    return os.str();
}

MoebiusMap compose(const MoebiusMap& m1, const MoebiusMap& m2) {
    return MoebiusMap(Int(m1.a() * m2.a() + m1.b() * m2.c()), Int(m1.a() * m2.b() + m1.b() * m2.d()),
                      Int(m1.c() * m2.a() + m1.d() * m2.c()), Int(m1.c() * m2.b() + m1.d() * m2.d()));
}

CirclePoint apply(const MoebiusMap& m, const CirclePoint& x) { return m(x); }

MoebiusMap commutator(const MoebiusMap& m1, const MoebiusMap& m2) {
    return compose(compose(m1.inverse(), m2.inverse()), compose(m1, m2));
}

MoebiusMap conjugate(const MoebiusMap& m, const MoebiusMap& h) {
    return compose(compose(h, m), h.inverse());
}

namespace {

std::optional<int> find_order(const MoebiusMap& m, int bound) {
    MoebiusMap p = m;
    for (int n = 1; n <= bound; ++n) {
        if (p.is_identity()) return n;
        p = compose(p, m);
    }
    return std::nullopt;
}

}  // namespace

MapClass classify(const MoebiusMap& m, int order_bound) {
    MapClass out;
    out.quad_a = m.c();
    out.quad_b = m.d() - m.a();
    out.quad_c = -m.b();
    if (m.is_identity()) {
        out.tag = MapTag::Identity;
        out.elliptic_order = 1;
        return out;
    }
    const Int disc = (m.a() - m.d()) * (m.a() - m.d()) + 4 * m.b() * m.c();
    if (disc < 0) {
        out.tag = MapTag::Elliptic;
        out.elliptic_order = find_order(m, order_bound);
        return out;
    }
    if (disc == 0) {
        out.tag = MapTag::Parabolic;
        if (m.c() == 0)
            out.fixed_points.push_back(CirclePoint::infinity());
        else
            out.fixed_points.push_back(CirclePoint(Rat(m.a() - m.d()) / Rat(2 * m.c())));
        return out;
    }
    out.tag = MapTag::Hyperbolic;
    std::vector<CirclePoint> fixed;
    if (m.c() == 0) {
        fixed.push_back(CirclePoint::infinity());
        fixed.push_back(CirclePoint(Rat(m.b()) / Rat(m.d() - m.a())));
    } else {
        const Rat base = Rat(m.a() - m.d()) / Rat(2 * m.c());
        const Rat radical = Rat(1) / Rat(2 * m.c());
        fixed.push_back(CirclePoint(base, radical, disc));
        fixed.push_back(CirclePoint(base, -radical, disc));
    }
    // Attracting fixed point first: |m'(x)| < 1, i.e. (c x + d)^2 > det.
    auto attracting = [&](const CirclePoint& x) {
        if (x.is_infinity()) return m.a() > m.d();  // derivative at inf is d/a after scaling
        const Rat u = Rat(m.c()) * x.quad_a() + Rat(m.d());
        const Rat v = Rat(m.c()) * x.quad_b();
        const Rat sq_rat = u * u + v * v * Rat(x.quad_d());
        return quad_compare(sq_rat, 2 * u * v, x.quad_d(), Rat(m.det()), Rat(0), Int(0)) > 0;
    };
    if (!attracting(fixed[0])) std::swap(fixed[0], fixed[1]);
    out.fixed_points = std::move(fixed);
    return out;
}

std::optional<Rat> rotation_number(const MoebiusMap& m, int order_bound) {
    if (m.is_identity()) return Rat(0);
    const MapClass cls = classify(m, order_bound);
    if (cls.tag != MapTag::Elliptic || !cls.elliptic_order) return std::nullopt;
    const int n = *cls.elliptic_order;
    std::vector<CirclePoint> orbit;
    orbit.emplace_back(0l);
    for (int i = 1; i < n; ++i) orbit.push_back(m(orbit.back()));
    // Winding = number of steps whose ccw arc crosses a cut point off the orbit.
    CirclePoint cut = CirclePoint::infinity();
    for (long num = 1;; ++num) {
        bool clash = false;
        for (const auto& p : orbit)
            if (p == cut) clash = true;
        if (!clash) break;
        cut = CirclePoint(Rat(2 * num - 1, 2));
    }
    long winding = 0;
    for (int i = 0; i < n; ++i) {
        const CirclePoint& from = orbit[static_cast<size_t>(i)];
        const CirclePoint to = (i + 1 < n) ? orbit[static_cast<size_t>(i + 1)] : orbit[0];
        if (from == to) continue;
        if (in_ccw_arc(from, cut, to)) ++winding;
    }
    Rat rot(winding, n);
    rot.canonicalize();
    return rot;
}

double translation_number(std::span<const MoebiusMap> word, const MoebiusMap& deck,
                          int iterations, const CirclePoint& start) {
    if (iterations < 1) throw std::invalid_argument("translation_number: iterations must be >= 1");
    if (deck.c() != 0 || deck.a() != deck.d() || deck.b() == 0)
        throw std::invalid_argument("translation_number: deck map must be a translation fixing inf");
    const Rat t = Rat(deck.b()) / Rat(deck.a());
    CirclePoint x = start;
    const CirclePoint x0 = start;
    for (int i = 0; i < iterations; ++i) {
        for (auto it = word.rbegin(); it != word.rend(); ++it) x = (*it)(x);
        if (x.is_infinity())
            throw std::domain_error("translation_number: orbit hit the infinity point");
    }
    const Rat displacement = (x.rational() - x0.rational()) / t;
    return displacement.get_d() / iterations;
}

}  // namespace folia
