#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finact/rational.hpp"

namespace finact {

using Mask = boost::dynamic_bitset<>;

// Finite probability space: atoms 0..n-1 with exact positive weights summing
// to 1. Immutable after creation; shared between events/actions via SpacePtr.
class AtomSpace {
  public:
    static std::shared_ptr<const AtomSpace> create(std::vector<Rat> weights);
    static std::shared_ptr<const AtomSpace> uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    const Rat& weight(std::size_t atom) const { return weights_.at(atom); }
    const std::vector<Rat>& weights() const { return weights_; }

    Rat measure(const Mask& members) const;

    bool operator==(const AtomSpace& other) const { return weights_ == other.weights_; }

  private:
    explicit AtomSpace(std::vector<Rat> weights) : weights_(std::move(weights)) {}
    std::vector<Rat> weights_;
};

using SpacePtr = std::shared_ptr<const AtomSpace>;

// Same space: pointer identity or structural equality. Binary event operations
// insist on it and raise DomainMismatchError otherwise.
bool same_space(const SpacePtr& a, const SpacePtr& b);
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where);

// Measurable event: a set of atoms of one space.
class Event {
  public:
    Event() = default;
    Event(SpacePtr space, Mask members);
    static Event empty(const SpacePtr& space);
    static Event full(const SpacePtr& space);
    static Event of_atoms(const SpacePtr& space, const std::vector<std::uint32_t>& atoms);
    static Event singleton(const SpacePtr& space, std::uint32_t atom);

    const SpacePtr& space() const { return space_; }
    const Mask& mask() const { return members_; }
    std::size_t count() const { return members_.count(); }
    bool contains(std::uint32_t atom) const { return members_.test(atom); }
    bool is_empty() const { return members_.none(); }

    Rat measure() const { return space_->measure(members_); }
    std::vector<std::uint32_t> atoms() const;

    Event operator&(const Event& o) const;
    Event operator|(const Event& o) const;
    Event operator^(const Event& o) const; // symmetric difference
    Event operator-(const Event& o) const; // set difference
    Event operator~() const;

    bool operator==(const Event& o) const;
    bool operator<(const Event& o) const; // numeric order on masks; total within a space
    bool subset_of(const Event& o) const;

  private:
    SpacePtr space_;
    Mask members_;
};

// Partition of the atoms; blocks numbered by first occurrence in atom order,
// so equal partitions have equal representations.
class Subalgebra {
  public:
    Subalgebra(SpacePtr space, std::vector<std::uint32_t> block_of);
    static Subalgebra trivial(const SpacePtr& space);
    static Subalgebra discrete(const SpacePtr& space);

    const SpacePtr& space() const { return space_; }
    std::uint32_t block_count() const { return block_count_; }
    std::uint32_t block_of(std::uint32_t atom) const { return block_of_.at(atom); }
    const std::vector<std::uint32_t>& block_map() const { return block_of_; }
    Event block(std::uint32_t b) const;
    Rat block_measure(std::uint32_t b) const;

    // True iff e is a union of blocks.
    bool contains(const Event& e) const;
    // All events of the subalgebra, i.e. unions of blocks; 2^block_count of
    // them. Throws ResourceError beyond max_events.
    std::vector<Event> events(std::size_t max_events) const;

    bool operator==(const Subalgebra& o) const;

  private:
    SpacePtr space_;
    std::vector<std::uint32_t> block_of_;
    std::uint32_t block_count_ = 0;
};

// Coarsest subalgebra in which every given event is a union of blocks.
// No events: the trivial partition.
Subalgebra generated_subalgebra(const SpacePtr& space, const std::vector<Event>& events);

// Common refinement of two partitions of one space.
Subalgebra join_subalgebra(const Subalgebra& a, const Subalgebra& b);

// Conditional expectation of an indicator: per block b, mu(a & b) / mu(b).
struct ConditionalExpectation {
    Subalgebra algebra;
    std::vector<Rat> value; // indexed by block

    // The expectation as a weighted event sum: sum over blocks of value * mu(block).
    Rat integral() const;
};

ConditionalExpectation conditional_expectation(const Event& a, const Subalgebra& algebra);

struct IndependenceWitness {
    Event a, b;            // offending events from the two generated algebras
    std::uint32_t c_block; // block of the conditioning algebra where the product fails
    Rat lhs, rhs;          // P(a|c) * P(b|c) and P(a & b | c)
};

struct IndependenceResult {
    bool independent = false;
    std::optional<IndependenceWitness> witness; // set iff !independent
};

// Probabilistic independence of the algebras generated by event families
// over a conditioning subalgebra: for every block c and all generated events
// a, b: P(a|c) P(b|c) = P(a & b|c). Checked on partition cells, which is
// equivalent by bilinearity; the exhaustive oracle over all generated events
// lives in the test suite.
IndependenceResult is_independent(const std::vector<Event>& fam_a,
                                  const std::vector<Event>& fam_b,
                                  const Subalgebra& cond);

struct TypeWitness {
    std::vector<int> signs; // +1 keep, -1 complement, per tuple position
    std::uint32_t c_block;
    Rat lhs, rhs;
};

struct TypeResult {
    bool equal = false;
    std::optional<TypeWitness> witness;
};

// Equality of types over a subalgebra: for every sign pattern s in {-1,+1}^n
// and every block c, P(meet of a_i^s | c) = P(meet of b_i^s | c).
TypeResult tp_equal(const std::vector<Event>& tuple_a,
                    const std::vector<Event>& tuple_b,
                    const Subalgebra& cond);

// Atom splitting. plan[atom] lists the positive weights of its pieces and must
// sum exactly to the atom's weight. Piece order is preserved; refined atoms
// are numbered source-major.
class Refinement {
  public:
    Refinement(SpacePtr source, SpacePtr refined, std::vector<std::uint32_t> to_source);
    static Refinement identity(const SpacePtr& space);

    const SpacePtr& source() const { return source_; }
    const SpacePtr& refined() const { return refined_; }
    std::uint32_t source_atom(std::uint32_t refined_atom) const { return to_source_.at(refined_atom); }
    const std::vector<std::uint32_t>& map() const { return to_source_; }
    const std::vector<std::vector<std::uint32_t>>& fibers() const { return fibers_; }

    // Preimage: events transport from source to refined space.
    Event lift(const Event& source_event) const;

  private:
    SpacePtr source_, refined_;
    std::vector<std::uint32_t> to_source_;
    std::vector<std::vector<std::uint32_t>> fibers_;
};

Refinement refine(const SpacePtr& space, const std::vector<std::vector<Rat>>& plan);

} // namespace finact
