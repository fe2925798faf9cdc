#include "finact/measure.hpp"

#include <algorithm>
#include <map>

namespace finact {

namespace {

std::string atom_name(std::size_t i) { return "atom " + std::to_string(i); }

} // namespace

std::shared_ptr<const AtomSpace> AtomSpace::create(std::vector<Rat> weights) {
    if (weights.empty()) throw PreconditionError("atom space needs at least one atom");
    Rat total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0)
            throw PreconditionError(atom_name(i) + " has non-positive weight " + rat_str(weights[i]));
        total += weights[i];
    }
    if (total != 1)
        throw PreconditionError("atom weights sum to " + rat_str(total) + ", expected 1");
    return std::shared_ptr<const AtomSpace>(new AtomSpace(std::move(weights)));
}

std::shared_ptr<const AtomSpace> AtomSpace::uniform(std::size_t n) {
    if (n == 0) throw PreconditionError("atom space needs at least one atom");
    return create(std::vector<Rat>(n, rat(1, static_cast<long>(n))));
}

Rat AtomSpace::measure(const Mask& members) const {
    if (members.size() != weights_.size())
        throw DomainMismatchError("mask size " + std::to_string(members.size()) +
                                  " does not match space size " + std::to_string(weights_.size()));
    Rat total = 0;
    for (auto i = members.find_first(); i != Mask::npos; i = members.find_next(i)) total += weights_[i];
    return total;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (!a || !b) return false;
    return a == b || *a == *b;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
    if (!same_space(a, b))
        throw DomainMismatchError(std::string(where) + ": operands live on different atom spaces");
}

Event::Event(SpacePtr space, Mask members) : space_(std::move(space)), members_(std::move(members)) {
    if (!space_) throw PreconditionError("event without a space");
    if (members_.size() != space_->size())
        throw DomainMismatchError("event mask size does not match its space");
}

Event Event::empty(const SpacePtr& space) { return Event(space, Mask(space->size())); }

Event Event::full(const SpacePtr& space) {
    Mask m(space->size());
    m.set();
    return Event(space, std::move(m));
}

Event Event::of_atoms(const SpacePtr& space, const std::vector<std::uint32_t>& atoms) {
    Mask m(space->size());
    for (auto a : atoms) {
        if (a >= space->size())
            throw PreconditionError(atom_name(a) + " out of range for space of size " +
                                    std::to_string(space->size()));
        m.set(a);
    }
    return Event(space, std::move(m));
}

Event Event::singleton(const SpacePtr& space, std::uint32_t atom) { return of_atoms(space, {atom}); }

std::vector<std::uint32_t> Event::atoms() const {
    std::vector<std::uint32_t> out;
    for (auto i = members_.find_first(); i != Mask::npos; i = members_.find_next(i))
        out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

Event Event::operator&(const Event& o) const {
    require_same_space(space_, o.space_, "event intersection");
    return Event(space_, members_ & o.members_);
}

Event Event::operator|(const Event& o) const {
    require_same_space(space_, o.space_, "event union");
    return Event(space_, members_ | o.members_);
}

Event Event::operator^(const Event& o) const {
    require_same_space(space_, o.space_, "event symmetric difference");
    return Event(space_, members_ ^ o.members_);
}

Event Event::operator-(const Event& o) const {
    require_same_space(space_, o.space_, "event difference");
    return Event(space_, members_ - o.members_);
}

Event Event::operator~() const { return Event(space_, ~members_); }

bool Event::operator==(const Event& o) const {
    return same_space(space_, o.space_) && members_ == o.members_;
}

bool Event::operator<(const Event& o) const {
    require_same_space(space_, o.space_, "event order");
    return members_ < o.members_;
}

bool Event::subset_of(const Event& o) const {
    require_same_space(space_, o.space_, "event subset");
    return members_.is_subset_of(o.members_);
}

Subalgebra::Subalgebra(SpacePtr space, std::vector<std::uint32_t> block_of)
    : space_(std::move(space)) {
    if (!space_) throw PreconditionError("subalgebra without a space");
    if (block_of.size() != space_->size())
        throw DomainMismatchError("subalgebra block map size does not match its space");
    // Renumber blocks by first occurrence so equal partitions compare equal.
    std::map<std::uint32_t, std::uint32_t> renumber;
    block_of_.resize(block_of.size());
    for (std::size_t i = 0; i < block_of.size(); ++i) {
        auto [it, inserted] = renumber.emplace(block_of[i], block_count_);
        if (inserted) ++block_count_;
        block_of_[i] = it->second;
    }
}

Subalgebra Subalgebra::trivial(const SpacePtr& space) {
    return Subalgebra(space, std::vector<std::uint32_t>(space->size(), 0));
}

Subalgebra Subalgebra::discrete(const SpacePtr& space) {
    std::vector<std::uint32_t> ids(space->size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
    return Subalgebra(space, std::move(ids));
}

Event Subalgebra::block(std::uint32_t b) const {
    if (b >= block_count_)
        throw PreconditionError("block " + std::to_string(b) + " out of range, partition has " +
                                std::to_string(block_count_) + " blocks");
    Mask m(space_->size());
    for (std::size_t i = 0; i < block_of_.size(); ++i)
        if (block_of_[i] == b) m.set(i);
    return Event(space_, std::move(m));
}

Rat Subalgebra::block_measure(std::uint32_t b) const { return block(b).measure(); }

bool Subalgebra::contains(const Event& e) const {
    require_same_space(space_, e.space(), "subalgebra membership");
    for (std::uint32_t b = 0; b < block_count_; ++b) {
        const Event blk = block(b);
        const Event meet = blk & e;
        if (!meet.is_empty() && !(meet == blk)) return false;
    }
    return true;
}

std::vector<Event> Subalgebra::events(std::size_t max_events) const {
    if (block_count_ >= 63 || (std::size_t{1} << block_count_) > max_events)
        throw ResourceError("subalgebra with " + std::to_string(block_count_) +
                            " blocks exceeds the event enumeration budget of " +
                            std::to_string(max_events));
    std::vector<Event> blocks;
    for (std::uint32_t b = 0; b < block_count_; ++b) blocks.push_back(block(b));
    std::vector<Event> out;
    const std::size_t total = std::size_t{1} << block_count_;
    out.reserve(total);
    for (std::size_t sel = 0; sel < total; ++sel) {
        Event e = Event::empty(space_);
        for (std::uint32_t b = 0; b < block_count_; ++b)
            if (sel >> b & 1) e = e | blocks[b];
        out.push_back(std::move(e));
    }
    return out;
}

bool Subalgebra::operator==(const Subalgebra& o) const {
    return same_space(space_, o.space_) && block_of_ == o.block_of_;
}

Subalgebra generated_subalgebra(const SpacePtr& space, const std::vector<Event>& events) {
    for (const Event& e : events) require_same_space(space, e.space(), "generated subalgebra");
    // Atoms with identical membership signatures across all events share a block.
    std::map<std::vector<bool>, std::uint32_t> sig_block;
    std::vector<std::uint32_t> block_of(space->size());
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < space->size(); ++i) {
        std::vector<bool> sig(events.size());
        for (std::size_t j = 0; j < events.size(); ++j) sig[j] = events[j].contains(static_cast<std::uint32_t>(i));
        auto [it, inserted] = sig_block.emplace(std::move(sig), next);
        if (inserted) ++next;
        block_of[i] = it->second;
    }
    return Subalgebra(space, std::move(block_of));
}

Subalgebra join_subalgebra(const Subalgebra& a, const Subalgebra& b) {
    require_same_space(a.space(), b.space(), "subalgebra join");
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> sig_block;
    std::vector<std::uint32_t> block_of(a.space()->size());
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < block_of.size(); ++i) {
        auto key = std::make_pair(a.block_of(static_cast<std::uint32_t>(i)),
                                  b.block_of(static_cast<std::uint32_t>(i)));
        auto [it, inserted] = sig_block.emplace(key, next);
        if (inserted) ++next;
        block_of[i] = it->second;
    }
    return Subalgebra(a.space(), std::move(block_of));
}

Rat ConditionalExpectation::integral() const {
    Rat total = 0;
    for (std::uint32_t b = 0; b < algebra.block_count(); ++b)
        total += value[b] * algebra.block_measure(b);
    return total;
}

ConditionalExpectation conditional_expectation(const Event& a, const Subalgebra& algebra) {
    require_same_space(a.space(), algebra.space(), "conditional expectation");
    std::vector<Rat> value;
    value.reserve(algebra.block_count());
    for (std::uint32_t b = 0; b < algebra.block_count(); ++b) {
        const Event blk = algebra.block(b);
        value.push_back((a & blk).measure() / blk.measure());
    }
    return ConditionalExpectation{algebra, std::move(value)};
}

IndependenceResult is_independent(const std::vector<Event>& fam_a,
                                  const std::vector<Event>& fam_b,
                                  const Subalgebra& cond) {
    const SpacePtr& space = cond.space();
    for (const Event& e : fam_a) require_same_space(space, e.space(), "independence");
    for (const Event& e : fam_b) require_same_space(space, e.space(), "independence");
    const Subalgebra alg_a = generated_subalgebra(space, fam_a);
    const Subalgebra alg_b = generated_subalgebra(space, fam_b);
    // Cell-level check; extends to all generated events by bilinearity of
    // (a, b) -> P(a|c) P(b|c) - P(a & b|c) in the cell decompositions.
    for (std::uint32_t c = 0; c < cond.block_count(); ++c) {
        const Event blk = cond.block(c);
        const Rat mc = blk.measure();
        for (std::uint32_t i = 0; i < alg_a.block_count(); ++i) {
            const Event cell_a = alg_a.block(i);
            const Rat pa = (cell_a & blk).measure() / mc;
            for (std::uint32_t j = 0; j < alg_b.block_count(); ++j) {
                const Event cell_b = alg_b.block(j);
                const Rat pb = (cell_b & blk).measure() / mc;
                const Rat pab = (cell_a & cell_b & blk).measure() / mc;
                if (pa * pb != pab)
                    return IndependenceResult{
                        false, IndependenceWitness{cell_a, cell_b, c, pa * pb, pab}};
            }
        }
    }
    return IndependenceResult{true, std::nullopt};
}

TypeResult tp_equal(const std::vector<Event>& tuple_a,
                    const std::vector<Event>& tuple_b,
                    const Subalgebra& cond) {
    if (tuple_a.size() != tuple_b.size())
        throw PreconditionError("type comparison needs tuples of equal length, got " +
                                std::to_string(tuple_a.size()) + " and " +
                                std::to_string(tuple_b.size()));
    const SpacePtr& space = cond.space();
    for (const Event& e : tuple_a) require_same_space(space, e.space(), "type equality");
    for (const Event& e : tuple_b) require_same_space(space, e.space(), "type equality");
    const std::size_t n = tuple_a.size();
    if (n > 20)
        throw ResourceError("type comparison over " + std::to_string(n) +
                            " events exceeds the 2^20 sign pattern budget");
    for (std::size_t pattern = 0; pattern < (std::size_t{1} << n); ++pattern) {
        Event meet_a = Event::full(space);
        Event meet_b = Event::full(space);
        std::vector<int> signs(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (pattern >> i & 1) {
                signs[i] = -1;
                meet_a = meet_a & ~tuple_a[i];
                meet_b = meet_b & ~tuple_b[i];
            } else {
                meet_a = meet_a & tuple_a[i];
                meet_b = meet_b & tuple_b[i];
            }
        }
        for (std::uint32_t c = 0; c < cond.block_count(); ++c) {
            const Event blk = cond.block(c);
            const Rat mc = blk.measure();
            const Rat lhs = (meet_a & blk).measure() / mc;
            const Rat rhs = (meet_b & blk).measure() / mc;
            if (lhs != rhs) return TypeResult{false, TypeWitness{signs, c, lhs, rhs}};
        }
    }
    return TypeResult{true, std::nullopt};
}

Refinement::Refinement(SpacePtr source, SpacePtr refined, std::vector<std::uint32_t> to_source)
    : source_(std::move(source)), refined_(std::move(refined)), to_source_(std::move(to_source)) {
    if (!source_ || !refined_) throw PreconditionError("refinement without spaces");
    if (to_source_.size() != refined_->size())
        throw DomainMismatchError("refinement map size does not match the refined space");
    fibers_.resize(source_->size());
    std::vector<Rat> fiber_weight(source_->size(), Rat(0));
    for (std::size_t i = 0; i < to_source_.size(); ++i) {
        const std::uint32_t s = to_source_[i];
        if (s >= source_->size())
            throw PreconditionError("refinement maps refined " + atom_name(i) +
                                    " to missing source atom " + std::to_string(s));
        fibers_[s].push_back(static_cast<std::uint32_t>(i));
        fiber_weight[s] += refined_->weight(i);
    }
    for (std::size_t s = 0; s < source_->size(); ++s) {
        if (fibers_[s].empty())
            throw PreconditionError("refinement misses source " + atom_name(s));
        if (fiber_weight[s] != source_->weight(s))
            throw PreconditionError("refinement pieces of source " + atom_name(s) + " sum to " +
                                    rat_str(fiber_weight[s]) + ", expected " +
                                    rat_str(source_->weight(s)));
    }
}

Refinement Refinement::identity(const SpacePtr& space) {
    std::vector<std::uint32_t> ids(space->size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
    return Refinement(space, space, std::move(ids));
}

Event Refinement::lift(const Event& source_event) const {
    require_same_space(source_, source_event.space(), "refinement lift");
    Mask m(refined_->size());
    for (std::size_t i = 0; i < to_source_.size(); ++i)
        if (source_event.contains(to_source_[i])) m.set(i);
    return Event(refined_, std::move(m));
}

Refinement refine(const SpacePtr& space, const std::vector<std::vector<Rat>>& plan) {
    if (plan.size() != space->size())
        throw PreconditionError("refinement plan covers " + std::to_string(plan.size()) +
                                " atoms, space has " + std::to_string(space->size()));
    std::vector<Rat> weights;
    std::vector<std::uint32_t> to_source;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (plan[i].empty())
            throw PreconditionError("refinement plan for " + atom_name(i) + " is empty");
        Rat total = 0;
        for (const Rat& w : plan[i]) {
            if (w <= 0)
                throw PreconditionError("refinement plan for " + atom_name(i) +
                                        " has non-positive piece " + rat_str(w));
            total += w;
            weights.push_back(w);
            to_source.push_back(static_cast<std::uint32_t>(i));
        }
        if (total != space->weight(i))
            throw PreconditionError("refinement plan for " + atom_name(i) + " sums to " +
                                    rat_str(total) + ", expected " + rat_str(space->weight(i)));
    }
    return Refinement(space, AtomSpace::create(std::move(weights)), std::move(to_source));
}

} // namespace finact
