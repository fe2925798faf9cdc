#pragma once

// Shared helpers for the unit and acceptance suites: deterministic generators
// and independent oracles. Oracles are deliberately written against the
// definitions, not against the library internals they check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "finact/action.hpp"
#include "finact/measure.hpp"

namespace testutil {

using finact::Action;
using finact::AtomSpace;
using finact::Event;
using finact::Mask;
using finact::Perm;
using finact::Rat;
using finact::SpacePtr;
using finact::Subalgebra;

using Rng = std::mt19937_64;

inline std::vector<std::uint32_t> random_perm(std::size_t n, Rng& rng) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> d(0, i - 1);
        std::swap(p[i - 1], p[d(rng)]);
    }
    return p;
}

inline Event event_of_mask_bits(const SpacePtr& sp, std::uint64_t bits) {
    Mask m(sp->size());
    for (std::size_t i = 0; i < sp->size(); ++i)
        if (bits >> i & 1) m.set(i);
    return Event(sp, std::move(m));
}

// Conjugate copy of an action under an atom relabeling (sigma: old -> new).
inline Action relabel_action(const Action& a, const Perm& sigma) {
    const std::size_t n = a.space()->size();
    std::vector<Rat> w(n);
    for (std::size_t x = 0; x < n; ++x) w[sigma[x]] = a.space()->weight(static_cast<std::uint32_t>(x));
    const Perm sigma_inv = finact::perm_inverse(sigma);
    std::vector<Perm> gens;
    for (std::size_t i = 0; i < a.arity(); ++i)
        gens.push_back(finact::perm_compose(sigma, finact::perm_compose(a.gen(i), sigma_inv)));
    return Action(AtomSpace::create(w), a.gen_names(), gens);
}

// Disjoint union of two copies of an action, each atom at half its original weight.
// The union acts blockwise, so the fold-back map (x mod n) is a 2-to-1 factor map.
inline Action half_union(const Action& a) {
    const std::size_t n = a.space()->size();
    std::vector<Rat> w(2 * n);
    for (std::size_t x = 0; x < n; ++x) {
        w[x] = a.space()->weight(static_cast<std::uint32_t>(x)) / 2;
        w[n + x] = w[x];
    }
    std::vector<Perm> gens;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        Perm g(2 * n);
        for (std::size_t x = 0; x < n; ++x) {
            g[x] = a.gen(i)[x];
            g[n + x] = static_cast<std::uint32_t>(n) + a.gen(i)[x];
        }
        gens.push_back(std::move(g));
    }
    return Action(AtomSpace::create(w), a.gen_names(), gens);
}

inline Event relabel_event(const Event& e, const SpacePtr& target, const Perm& sigma) {
    Mask m(target->size());
    for (auto x : e.atoms()) m.set(sigma[x]);
    return Event(target, std::move(m));
}

inline Event random_event(const SpacePtr& sp, Rng& rng) {
    Mask m(sp->size());
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t i = 0; i < sp->size(); ++i)
        if (coin(rng)) m.set(i);
    return Event(sp, std::move(m));
}

// Full-quantification independence oracle: checks the product identity for
// every event of the algebra generated by fam_a against every event generated
// by fam_b, on every conditioning block. Exponential; callers keep spaces
// at <= 10 atoms.
inline bool independent_oracle(const std::vector<Event>& fam_a,
                               const std::vector<Event>& fam_b,
                               const Subalgebra& cond) {
    const SpacePtr& sp = cond.space();
    const auto events_a = finact::generated_subalgebra(sp, fam_a).events(1 << 12);
    const auto events_b = finact::generated_subalgebra(sp, fam_b).events(1 << 12);
    for (std::uint32_t c = 0; c < cond.block_count(); ++c) {
        const Event blk = cond.block(c);
        const Rat mc = blk.measure();
        for (const Event& a : events_a)
            for (const Event& b : events_b) {
                const Rat pa = (a & blk).measure() / mc;
                const Rat pb = (b & blk).measure() / mc;
                const Rat pab = (a & b & blk).measure() / mc;
                if (pa * pb != pab) return false;
            }
    }
    return true;
}

// Automorphism-search type oracle: looks for a weight-preserving atom
// bijection that maps every conditioning block onto itself and each a_i onto
// b_i. Factorial; callers keep spaces at <= 8 atoms.
inline bool tp_automorphism_oracle(const std::vector<Event>& tuple_a,
                                   const std::vector<Event>& tuple_b,
                                   const Subalgebra& cond) {
    const SpacePtr& sp = cond.space();
    const std::size_t n = sp->size();
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    do {
        bool ok = true;
        for (std::size_t x = 0; x < n && ok; ++x) {
            if (sp->weight(x) != sp->weight(perm[x])) ok = false;
            if (ok && cond.block_of(static_cast<std::uint32_t>(x)) != cond.block_of(perm[x]))
                ok = false;
        }
        for (std::size_t t = 0; t < tuple_a.size() && ok; ++t)
            for (std::size_t x = 0; x < n && ok; ++x)
                if (tuple_a[t].contains(static_cast<std::uint32_t>(x)) !=
                    tuple_b[t].contains(perm[x]))
                    ok = false;
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Exhaustive uniform-distance oracle: max over all 2^n events of
// mu(p a symdiff q a). Callers keep n <= 12.
inline Rat du_exhaustive(const SpacePtr& sp, const std::vector<std::uint32_t>& p,
                         const std::vector<std::uint32_t>& q) {
    const std::size_t n = sp->size();
    Rat best = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::uint64_t pa = 0, qa = 0;
        for (std::size_t x = 0; x < n; ++x)
            if (bits >> x & 1) {
                pa |= std::uint64_t{1} << p[x];
                qa |= std::uint64_t{1} << q[x];
            }
        const std::uint64_t sym = pa ^ qa;
        Rat m = 0;
        for (std::size_t x = 0; x < n; ++x)
            if (sym >> x & 1) m += sp->weight(x);
        if (m > best) best = m;
    }
    return best;
}

// Every maximal event disjoint from its image, by exhaustive enumeration.
// Callers keep n <= 12.
inline std::vector<std::uint64_t> all_maximal_bases(const SpacePtr& sp,
                                                    const std::vector<std::uint32_t>& p) {
    const std::size_t n = sp->size();
    std::vector<std::uint32_t> pinv(n);
    for (std::size_t i = 0; i < n; ++i) pinv[p[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::uint64_t> out;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
        bool disjoint = true;
        for (std::size_t x = 0; x < n && disjoint; ++x)
            if (a >> x & 1) {
                if (p[x] == x || (a >> p[x] & 1)) disjoint = false;
            }
        if (!disjoint) continue;
        bool maximal = true;
        for (std::size_t y = 0; y < n && maximal; ++y) {
            if (a >> y & 1 || p[y] == y) continue;
            if (!(a >> p[y] & 1) && !(a >> pinv[y] & 1)) maximal = false;
        }
        if (maximal) out.push_back(a);
    }
    return out;
}

} // namespace testutil
