#include "folia/rational.hpp"

namespace folia {

Rat parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    try {
        Rat r(s);
        r.canonicalize();
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
        return r;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (...) {
        throw std::invalid_argument("malformed rational literal: " + text);
    }
}

std::string to_string(const Rat& x) { return x.get_str(); }

int quad_sign(const Rat& a, const Rat& b, const Int& D) {
    if (D < 0) throw std::invalid_argument("quad_sign: negative radicand");
    if (b == 0 || D == 0) return sgn(a);
    if (a == 0) return sgn(b);
    const int sa = sgn(a), sb = sgn(b);
    if (sa == sb) return sa;
    // Opposite signs: the larger magnitude wins; compare a^2 against b^2 D.
    Rat lhs = a * a;
    Rat rhs = b * b * Rat(D);
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
}

int quad_compare(const Rat& a1, const Rat& b1, const Int& D1,
                 const Rat& a2, const Rat& b2, const Int& D2) {
    const Rat u = a1 - a2;
    const bool r1 = (b1 == 0 || D1 == 0);
    const bool r2 = (b2 == 0 || D2 == 0);
    if (r1 && r2) return sgn(u);
    if (r1) return quad_sign(u, -b2, D2);
    if (r2) return quad_sign(u, b1, D1);
    if (D1 == D2) return quad_sign(u, b1 - b2, D1);
    // sign of u + b1 sqrt(D1) + w sqrt(D2) with w = -b2; both radical parts nonzero.
    const Rat w = -b2;
    const int sl = quad_sign(u, b1, D1);
    const int sr = sgn(w);
    if (sl == 0) return sr;
    if (sl == sr) return sl;
    // Compare (u + b1 sqrt(D1))^2 against w^2 D2; the square lives in Q(sqrt(D1)).
    const Rat lhs_rat = u * u + b1 * b1 * Rat(D1) - w * w * Rat(D2);
    const int t = quad_sign(lhs_rat, 2 * u * b1, D1);
    if (t == 0) return 0;
    return t > 0 ? sl : sr;
}

}  // namespace folia
