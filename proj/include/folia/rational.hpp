#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace folia {

using Rat = mpq_class;
using Int = mpz_class;

// floor(p/q) as an exact integer (works for negative values).
inline Int rat_floor(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

inline int sgn(const Rat& x) { return sgn(x.get_num()); }

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input.
Rat parse_rational(const std::string& text);

std::string to_string(const Rat& x);

// Sign of a + b*sqrt(D) with D >= 0, evaluated exactly.
int quad_sign(const Rat& a, const Rat& b, const Int& D);

// Exact compare of a1 + b1*sqrt(D1) against a2 + b2*sqrt(D2).
// Representations need not share D and need not be square-free.
int quad_compare(const Rat& a1, const Rat& b1, const Int& D1,
                 const Rat& a2, const Rat& b2, const Int& D2);

}  // namespace folia
