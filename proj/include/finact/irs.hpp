#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "finact/canonical.hpp"

namespace finact {

// Stabilizer-class distribution of an action: mass of a rooted class is the
// total weight of the atoms realizing it. Masses are positive and sum to 1.
struct EmpiricalIRS {
    std::size_t arity = 0;
    std::vector<std::pair<RootedSchreierClass, Rat>> classes; // sorted by class

    Rat mass_of(const RootedSchreierClass& c) const;
    // "table=mass;table=mass" over the sorted classes; byte-stable.
    std::string encode() const;
};

// arity pads every table with identity rows; must be at least the action's.
EmpiricalIRS empirical_irs(const Action& action, std::size_t arity = 0);

// Exact equality after padding both sides to a common arity.
bool irs_equal(const EmpiricalIRS& a, const EmpiricalIRS& b);

struct IrsDifference {
    RootedSchreierClass cls;
    Rat mass_a, mass_b;
};
// A class with distinct masses (after padding); nullopt when equal.
std::optional<IrsDifference> irs_first_difference(const EmpiricalIRS& a, const EmpiricalIRS& b);

// F: words that must fix the point; G: words that must move it. F and G are
// disjoint as reduced words.
struct CylinderQuery {
    std::vector<Word> fix_words;
    std::vector<Word> supp_words;
};

// mu of the intersection of Fix(w) over F and Supp(w) over G, plus an
// internal assertion that the inclusion-exclusion recomputation agrees.
Rat irs_cylinder(const Action& action, const CylinderQuery& q);

// Independent route: sum over J subset of G of (-1)^|J| mu(Fix over F union J).
// Exponential in |G| (guarded at 20 words).
Rat irs_cylinder_incl_excl(const Action& action, const CylinderQuery& q);

// The same query answered from the distribution alone: total mass of classes
// where every F-word loops at the root and no G-word does.
Rat irs_cylinder_mass(const EmpiricalIRS& irs, const CylinderQuery& q);

// Supp-form cylinder: mass of classes where no listed word loops, i.e. mu of
// the intersection of the supports. Distinct from the Fix-form on purpose.
Rat supp_cylinder_mass(const EmpiricalIRS& irs, const std::vector<Word>& words);

// Conjugation action on the occurring classes: class-of(g x) as a function of
// class-of(x), with the class masses as weights.
struct IrsFactor {
    Action class_action;
    FactorMap to_classes;                     // original action -> class action
    std::vector<RootedSchreierClass> classes; // class atom id -> class
};

IrsFactor irs_factor(const Action& action, std::size_t arity = 0);

} // namespace finact
