#pragma once

#include <gmpxx.h>

#include <string>

#include "finact/errors.hpp"

namespace finact {

// Exact rational scalar. All measures, distances and formula values in this
// library are Rat; no floating point participates in any computation.
using Rat = mpq_class;

// Canonicalized p/q. GMP does not canonicalize two-argument construction.
inline Rat rat(long p, long q = 1) {
    if (q == 0) throw PreconditionError("rational with zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

// Accepts "p/q" or "p" with optional leading minus. Used at every text boundary.
Rat rat_parse(const std::string& text);

// Emits "p/q", or "p" when the denominator is 1. Inverse of rat_parse on
// canonical forms.
std::string rat_str(const Rat& r);

// Decimal approximation for human-readable output only.
double rat_approx(const Rat& r);

// Largest rational dividing both (quotients integral). Positive inputs only.
Rat rat_gcd(const Rat& a, const Rat& b);

} // namespace finact
