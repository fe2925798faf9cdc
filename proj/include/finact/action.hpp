#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finact/measure.hpp"

namespace finact {

// Permutation of the atoms, stored as the image table.
using Perm = std::vector<std::uint32_t>;

Perm perm_identity(std::size_t n);
Perm perm_inverse(const Perm& p);
// Composition acts like functions: (compose(p, q))(x) = p(q(x)).
Perm perm_compose(const Perm& p, const Perm& q);
bool perm_valid(const Perm& p, std::size_t n);

// Freely reduced word over countably many generators. Letters are signed
// 1-based generator indices: +i is the i-th generator, -i its inverse.
// Generators beyond an action's arity act as the identity.
class Word {
  public:
    Word() = default;
    explicit Word(std::vector<std::int32_t> letters);
    static Word gen(std::uint32_t index, int sign = +1);
    static Word power(std::uint32_t index, int exponent);

    const std::vector<std::int32_t>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool is_identity() const { return letters_.empty(); }
    std::uint32_t max_generator() const;

    Word inverse() const;
    Word operator*(const Word& o) const; // concatenate then reduce

    bool operator==(const Word& o) const { return letters_ == o.letters_; }
    bool operator<(const Word& o) const { return letters_ < o.letters_; }

    // "e" for the identity, otherwise letters joined with '.', inverses
    // marked with a trailing apostrophe: "a.b'.a".
    std::string str(const std::vector<std::string>& names) const;

  private:
    std::vector<std::int32_t> letters_;
};

// Pmp action of a finitely generated free group: one weight-preserving
// permutation per listed generator. Unlisted generators act as the identity.
class Action {
  public:
    Action(SpacePtr space, std::vector<std::string> gen_names, std::vector<Perm> gens);
    static Action with_default_names(SpacePtr space, std::vector<Perm> gens);

    const SpacePtr& space() const { return space_; }
    std::size_t arity() const { return gens_.size(); }
    const std::vector<std::string>& gen_names() const { return gen_names_; }
    const Perm& gen(std::size_t i) const { return gens_.at(i); }
    const Perm& gen_inv(std::size_t i) const { return gen_inv_.at(i); }
    std::optional<std::uint32_t> gen_index(const std::string& name) const;

    // Orbit partition under all listed generators. Atoms on one orbit always
    // carry equal weight (generators are weight-preserving).
    Subalgebra orbits() const;

    Event apply(const Word& w, const Event& e) const;
    std::uint32_t apply(const Word& w, std::uint32_t atom) const;

  private:
    SpacePtr space_;
    std::vector<std::string> gen_names_;
    std::vector<Perm> gens_;
    std::vector<Perm> gen_inv_;
};

// The permutation of a word under the action, identity-padded beyond arity.
Perm evaluate_word(const Action& action, const Word& w);

// Atoms fixed by the word.
Event fixed_event(const Action& action, const Word& w);

// Atoms moved by the permutation (complement of its fixed set).
Event moved_event(const SpacePtr& space, const Perm& p);

// One term of the support: t(b) = (b \ pb) | p(b \ pb) | p^-1(b \ pb).
// Always a subset of the moved set; equals it at the greedy witness base.
Event support_term(const SpacePtr& space, const Perm& p, const Event& b);

struct SupportWitness {
    Event base;    // maximal event disjoint from its image, greedy in scan order
    Event support; // base | p(base) | p^-1(base); equals the moved set
};

// Greedy in atom-id order by default; any scan order yields a maximal base
// with the same support.
SupportWitness support_witness(const SpacePtr& space, const Perm& p);
SupportWitness support_witness(const SpacePtr& space, const Perm& p,
                               const std::vector<std::uint32_t>& scan_order);

// Uniform distance between two weight-preserving permutations:
// sup over events of mu(p a symdiff q a), computed in closed form from the
// cycles of q^-1 p: 2 * sum over cycles of floor(len/2) * atom weight.
Rat uniform_distance(const SpacePtr& space, const Perm& p, const Perm& q);

// Action distance: max over generator slots (identity-padded to the larger
// arity) of the permutation distance. Requires one common space.
Rat uniform_distance(const Action& a, const Action& b);

struct DistanceToSupport {
    Event support;
    Rat a_minus_support;
    Rat support_minus_a;
    Rat distance; // mu(a symdiff support)
};

DistanceToSupport distance_to_support(const Event& a, const Word& w, const Action& action);

// Atomwise factor map from source onto target: measure-preserving and
// equivariant surjection.
struct FactorMap {
    Action source;
    Action target;
    std::vector<std::uint32_t> map; // source atom -> target atom

    std::uint32_t operator()(std::uint32_t atom) const { return map.at(atom); }
    Event preimage(const Event& target_event) const;
};

struct FactorCheck {
    enum class Failure { none, range, measure, equivariance };
    bool ok = false;
    Failure failure = Failure::none;
    std::string detail;
    // For measure failures: the target atom. For equivariance: source atom
    // and generator slot.
    std::optional<std::uint32_t> atom;
    std::optional<std::uint32_t> generator;
};

FactorCheck is_factor_map(const FactorMap& fm);

struct DefinableClosure {
    Subalgebra algebra;
    std::size_t group_order; // order of the image group that was enumerated
};

// Subalgebra generated by all image-group translates of the given events
// together with the point-stabilizer partition of the image group (the
// latter is what all fixed sets and supports of words generate).
DefinableClosure definable_closure(const Action& action, const std::vector<Event>& events,
                                   std::size_t max_group_order = 50000);

} // namespace finact
