#pragma once

#include <utility>
#include <vector>

#include "finact/irs.hpp"

namespace finact {

// Fiberwise conditional distributions of a measure-preserving atom map.
struct Disintegration {
    FactorMap pi;
    // fibers[t] = (source atom, conditional weight), ascending by atom; each
    // fiber sums to exactly 1.
    std::vector<std::vector<std::pair<std::uint32_t, Rat>>> fibers;
};

// Accepts any measure-preserving surjection (equivariance not required).
Disintegration disintegrate(const FactorMap& pi);

struct JoinResult {
    Action joined;
    // joined atom id -> (left atom, right atom), lexicographic.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_atoms;
    FactorMap p1, p2; // joined -> left, joined -> right
    Action common;    // the factor joined over
    FactorMap q1, q2; // left -> common, right -> common
};

// Fibered product with weights mu(x) nu(y) / lambda(w) over matching factor
// images; the diagonal action preserves them. Marginal exactness and the
// factor-map property of both projections are asserted.
JoinResult independent_joining(const Action& alpha, const Action& beta, const Action& xi,
                               const FactorMap& pi1, const FactorMap& pi2);

// Joining over the stabilizer-class factors. Precondition: equal empirical
// distributions (error names a distinguishing class). Asserts the three-way
// class identity on every joined atom.
JoinResult join_over_irs(const Action& alpha, const Action& beta);

// Common subalgebra given on both sides with an explicit block matching:
// block b of z1 corresponds to block correspondence[b] of z2.
struct CommonSubalgebra {
    Subalgebra z1, z2;
    std::vector<std::uint32_t> correspondence;
};

// Relative independent joining over the common subalgebra. Preconditions:
// corresponding blocks carry equal mass, every generator (identity-padded)
// permutes the blocks identically on both sides, and the support of every
// required word is a union of corresponding blocks. Postcondition: those
// supports are preserved under both embeddings, exactly.
JoinResult amalgamate(const Action& m1, const Action& m2, const CommonSubalgebra& z,
                      const std::vector<Word>& required_words);

} // namespace finact
