#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finact/action.hpp"
#include "finact/conjugacy.hpp"

namespace finact {

// An action plus named events, as carried by document files.
struct ActionDocument {
    Action action;
    std::vector<std::pair<std::string, Event>> events;
};

// Line-based, versioned document:
//
//   finact-action v1
//   atoms <n>
//   <id> <p/q>                 one line per atom, ids ascending from 0
//   gen <name> <img ...>       one image per atom, a weight-preserving permutation
//   event <name> <id ...>      possibly empty id list
//
// Blank lines and lines starting with '#' are skipped. Every rejection names
// its line: weight sum != 1, non-permutation tables, and weight mismatches
// under a generator (naming both atoms).
ActionDocument parse_action(const std::string& text);

// Canonical text: ascending atom ids, generators and events in held order,
// event ids ascending, one trailing newline. parse . serialize is the
// identity; serialize . parse is the identity on canonical documents.
std::string serialize_action(const ActionDocument& doc);

// Witness transport for the conjugacy pipeline, as a versioned JSON object.
// The refined spaces are rebuilt from delta and the piece maps, so a witness
// file together with the two action documents replays a full verification.
std::string serialize_witness(const ConjugacyWitness& w);
ConjugacyWitness parse_witness(const std::string& text, const Action& alpha, const Action& beta);

// Instance generators. All emit uniform weights and default generator names.
// cyclic: one n-cycle.
ActionDocument gen_cyclic(std::uint32_t n);
// orbits: one generator cycling each consecutive block of the given sizes.
ActionDocument gen_orbits(const std::vector<std::uint32_t>& sizes);
// random: k independent uniform permutations of n atoms, Fisher-Yates driven
// by mt19937_64(seed); identical inputs give identical documents.
ActionDocument gen_random(std::uint32_t n, std::uint32_t k, std::uint64_t seed);
// coset: the k-generator action on Z/m1 x ... x Z/mk in which generator i
// steps coordinate i; the coset action of the rank-k free group on the
// abelianization quotient. Atom ids are mixed-radix, last coordinate fastest.
ActionDocument gen_coset(const std::vector<std::uint32_t>& moduli);

} // namespace finact
