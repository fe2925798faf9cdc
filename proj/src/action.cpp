#include "finact/action.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace finact {

Perm perm_identity(std::size_t n) {
    Perm p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    return p;
}

Perm perm_inverse(const Perm& p) {
    Perm inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<std::uint32_t>(i);
    return inv;
}

Perm perm_compose(const Perm& p, const Perm& q) {
    if (p.size() != q.size()) throw DomainMismatchError("composing permutations of different sizes");
    Perm out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[q[i]];
    return out;
}

bool perm_valid(const Perm& p, std::size_t n) {
    if (p.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto v : p) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Word::Word(std::vector<std::int32_t> letters) {
    for (auto l : letters) {
        if (l == 0) throw PreconditionError("word letter 0 is not a generator");
        if (!letters_.empty() && letters_.back() == -l)
            letters_.pop_back();
        else
            letters_.push_back(l);
    }
}

Word Word::gen(std::uint32_t index, int sign) {
    if (index == 0) throw PreconditionError("generator indices are 1-based");
    if (sign != 1 && sign != -1) throw PreconditionError("generator sign must be +1 or -1");
    return Word({sign * static_cast<std::int32_t>(index)});
}

Word Word::power(std::uint32_t index, int exponent) {
    std::vector<std::int32_t> ls(static_cast<std::size_t>(std::abs(exponent)),
                                 exponent >= 0 ? static_cast<std::int32_t>(index)
                                               : -static_cast<std::int32_t>(index));
    if (index == 0) throw PreconditionError("generator indices are 1-based");
    return Word(std::move(ls));
}

std::uint32_t Word::max_generator() const {
    std::uint32_t m = 0;
    for (auto l : letters_) m = std::max(m, static_cast<std::uint32_t>(std::abs(l)));
    return m;
}

Word Word::inverse() const {
    std::vector<std::int32_t> ls(letters_.rbegin(), letters_.rend());
    for (auto& l : ls) l = -l;
    Word w;
    w.letters_ = std::move(ls); // reversal of a reduced word is reduced
    return w;
}

Word Word::operator*(const Word& o) const {
    std::vector<std::int32_t> ls = letters_;
    ls.insert(ls.end(), o.letters_.begin(), o.letters_.end());
    return Word(std::move(ls));
}

std::string Word::str(const std::vector<std::string>& names) const {
    if (letters_.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) out += '.';
        const auto idx = static_cast<std::uint32_t>(std::abs(letters_[i]));
        if (idx <= names.size())
            out += names[idx - 1];
        else
            out += "g" + std::to_string(idx);
        if (letters_[i] < 0) out += '\'';
    }
    return out;
}

Action::Action(SpacePtr space, std::vector<std::string> gen_names, std::vector<Perm> gens)
    : space_(std::move(space)), gen_names_(std::move(gen_names)), gens_(std::move(gens)) {
    if (!space_) throw PreconditionError("action without a space");
    if (gen_names_.size() != gens_.size())
        throw PreconditionError("action has " + std::to_string(gens_.size()) + " generators but " +
                                std::to_string(gen_names_.size()) + " names");
    std::set<std::string> seen;
    for (const auto& nm : gen_names_) {
        if (nm.empty()) throw PreconditionError("empty generator name");
        if (!seen.insert(nm).second) throw PreconditionError("duplicate generator name '" + nm + "'");
    }
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (!perm_valid(gens_[i], space_->size()))
            throw PreconditionError("generator '" + gen_names_[i] +
                                    "' is not a permutation of the atoms");
        for (std::size_t x = 0; x < space_->size(); ++x)
            if (space_->weight(gens_[i][x]) != space_->weight(x))
                throw PreconditionError("generator '" + gen_names_[i] +
                                        "' does not preserve the weight of atom " +
                                        std::to_string(x));
        gen_inv_.push_back(perm_inverse(gens_[i]));
    }
}

Action Action::with_default_names(SpacePtr space, std::vector<Perm> gens) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < gens.size(); ++i) names.push_back("g" + std::to_string(i + 1));
    return Action(std::move(space), std::move(names), std::move(gens));
}

std::optional<std::uint32_t> Action::gen_index(const std::string& name) const {
    for (std::size_t i = 0; i < gen_names_.size(); ++i)
        if (gen_names_[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

Subalgebra Action::orbits() const {
    const std::size_t n = space_->size();
    std::vector<std::uint32_t> root(n);
    std::vector<bool> seen(n, false);
    std::uint32_t next = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
        seen[start] = true;
        root[start] = next;
        while (!queue.empty()) {
            const auto x = queue.front();
            queue.pop_front();
            for (std::size_t g = 0; g < gens_.size(); ++g)
                for (const auto y : {gens_[g][x], gen_inv_[g][x]})
                    if (!seen[y]) {
                        seen[y] = true;
                        root[y] = next;
                        queue.push_back(y);
                    }
        }
        ++next;
    }
    return Subalgebra(space_, std::move(root));
}

std::uint32_t Action::apply(const Word& w, std::uint32_t atom) const {
    if (atom >= space_->size())
        throw PreconditionError("atom " + std::to_string(atom) + " out of range");
    std::uint32_t y = atom;
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        const auto idx = static_cast<std::uint32_t>(std::abs(*it));
        if (idx > gens_.size()) continue; // unlisted generators act as the identity
        y = (*it > 0) ? gens_[idx - 1][y] : gen_inv_[idx - 1][y];
    }
    return y;
}

Event Action::apply(const Word& w, const Event& e) const {
    require_same_space(space_, e.space(), "word application");
    Mask out(space_->size());
    for (auto x : e.atoms()) out.set(apply(w, x));
    return Event(space_, std::move(out));
}

Perm evaluate_word(const Action& action, const Word& w) {
    const std::size_t n = action.space()->size();
    Perm out(n);
    for (std::size_t x = 0; x < n; ++x) out[x] = action.apply(w, static_cast<std::uint32_t>(x));
    return out;
}

Event fixed_event(const Action& action, const Word& w) {
    const Perm p = evaluate_word(action, w);
    Mask m(action.space()->size());
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p[x] == x) m.set(x);
    return Event(action.space(), std::move(m));
}

Event moved_event(const SpacePtr& space, const Perm& p) {
    if (!perm_valid(p, space->size()))
        throw PreconditionError("moved set of a non-permutation");
    Mask m(space->size());
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p[x] != x) m.set(x);
    return Event(space, std::move(m));
}

Event support_term(const SpacePtr& space, const Perm& p, const Event& b) {
    require_same_space(space, b.space(), "support term");
    const Perm pinv = perm_inverse(p);
    Mask core(space->size());
    for (auto x : b.atoms())
        if (!b.contains(pinv[x])) core.set(x); // x in b \ p(b)
    Mask out = core;
    for (auto x = core.find_first(); x != Mask::npos; x = core.find_next(x)) {
        out.set(p[x]);
        out.set(pinv[x]);
    }
    return Event(space, std::move(out));
}

SupportWitness support_witness(const SpacePtr& space, const Perm& p) {
    std::vector<std::uint32_t> order(space->size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    return support_witness(space, p, order);
}

SupportWitness support_witness(const SpacePtr& space, const Perm& p,
                               const std::vector<std::uint32_t>& scan_order) {
    if (!perm_valid(p, space->size()))
        throw PreconditionError("support witness of a non-permutation");
    if (scan_order.size() != space->size())
        throw PreconditionError("support witness scan order must list every atom once");
    const Perm pinv = perm_inverse(p);
    Mask base(space->size());
    // Greedy: x joins if it is moved and neither sends into nor receives from
    // the current base. Blocking is monotone, so one pass reaches maximality.
    for (auto x : scan_order) {
        if (x >= space->size()) throw PreconditionError("scan order atom out of range");
        if (p[x] == x) continue;
        if (base.test(p[x]) || base.test(pinv[x])) continue;
        base.set(x);
    }
    Mask supp = base;
    for (auto x = base.find_first(); x != Mask::npos; x = base.find_next(x)) {
        supp.set(p[x]);
        supp.set(pinv[x]);
    }
    return SupportWitness{Event(space, std::move(base)), Event(space, std::move(supp))};
}

Rat uniform_distance(const SpacePtr& space, const Perm& p, const Perm& q) {
    if (!perm_valid(p, space->size()) || !perm_valid(q, space->size()))
        throw PreconditionError("uniform distance of non-permutations");
    // sup_a mu(pa ^ qa) = sup_a mu(sa ^ a) with s = q^-1 p; per s-cycle the
    // best event alternates, contributing 2*floor(len/2)*weight.
    const Perm qinv = perm_inverse(q);
    Rat total = 0;
    std::vector<bool> seen(space->size(), false);
    for (std::size_t x = 0; x < space->size(); ++x) {
        if (seen[x]) continue;
        std::size_t len = 0;
        std::uint32_t y = static_cast<std::uint32_t>(x);
        while (!seen[y]) {
            seen[y] = true;
            ++len;
            y = qinv[p[y]];
        }
        if (len >= 2) total += rat(2 * static_cast<long>(len / 2)) * space->weight(x);
    }
    return total;
}

Rat uniform_distance(const Action& a, const Action& b) {
    require_same_space(a.space(), b.space(), "action distance");
    const std::size_t arity = std::max(a.arity(), b.arity());
    const Perm id = perm_identity(a.space()->size());
    Rat best = 0;
    for (std::size_t i = 0; i < arity; ++i) {
        const Perm& pa = i < a.arity() ? a.gen(i) : id;
        const Perm& pb = i < b.arity() ? b.gen(i) : id;
        best = std::max(best, uniform_distance(a.space(), pa, pb));
    }
    return best;
}

DistanceToSupport distance_to_support(const Event& a, const Word& w, const Action& action) {
    require_same_space(a.space(), action.space(), "distance to support");
    const Event supp = moved_event(action.space(), evaluate_word(action, w));
    DistanceToSupport out{supp, (a - supp).measure(), (supp - a).measure(), Rat(0)};
    out.distance = out.a_minus_support + out.support_minus_a;
    return out;
}

Event FactorMap::preimage(const Event& target_event) const {
    require_same_space(target.space(), target_event.space(), "factor preimage");
    Mask m(source.space()->size());
    for (std::size_t y = 0; y < map.size(); ++y)
        if (target_event.contains(map[y])) m.set(y);
    return Event(source.space(), std::move(m));
}

FactorCheck is_factor_map(const FactorMap& fm) {
    FactorCheck out;
    const std::size_t ny = fm.source.space()->size();
    const std::size_t nx = fm.target.space()->size();
    if (fm.map.size() != ny)
        throw PreconditionError("factor map covers " + std::to_string(fm.map.size()) +
                                " atoms, source space has " + std::to_string(ny));
    for (std::size_t y = 0; y < ny; ++y)
        if (fm.map[y] >= nx) {
            out.failure = FactorCheck::Failure::range;
            out.atom = static_cast<std::uint32_t>(y);
            out.detail = "source atom " + std::to_string(y) + " maps to missing target atom " +
                         std::to_string(fm.map[y]);
            return out;
        }
    std::vector<Rat> fiber(nx, Rat(0));
    for (std::size_t y = 0; y < ny; ++y) fiber[fm.map[y]] += fm.source.space()->weight(y);
    for (std::size_t x = 0; x < nx; ++x)
        if (fiber[x] != fm.target.space()->weight(x)) {
            out.failure = FactorCheck::Failure::measure;
            out.atom = static_cast<std::uint32_t>(x);
            out.detail = "fiber over target atom " + std::to_string(x) + " has mass " +
                         rat_str(fiber[x]) + ", expected " + rat_str(fm.target.space()->weight(x));
            return out;
        }
    const std::size_t arity = std::max(fm.source.arity(), fm.target.arity());
    const Perm idy = perm_identity(ny);
    const Perm idx = perm_identity(nx);
    for (std::size_t g = 0; g < arity; ++g) {
        const Perm& ps = g < fm.source.arity() ? fm.source.gen(g) : idy;
        const Perm& pt = g < fm.target.arity() ? fm.target.gen(g) : idx;
        for (std::size_t y = 0; y < ny; ++y)
            if (fm.map[ps[y]] != pt[fm.map[y]]) {
                out.failure = FactorCheck::Failure::equivariance;
                out.atom = static_cast<std::uint32_t>(y);
                out.generator = static_cast<std::uint32_t>(g);
                out.detail = "generator slot " + std::to_string(g) +
                             " does not commute with the map at source atom " + std::to_string(y);
                return out;
            }
    }
    out.ok = true;
    return out;
}

DefinableClosure definable_closure(const Action& action, const std::vector<Event>& events,
                                   std::size_t max_group_order) {
    const SpacePtr& space = action.space();
    for (const Event& e : events) require_same_space(space, e.space(), "definable closure");
    // Enumerate the image group by BFS over generator products.
    std::set<Perm> seen;
    std::deque<Perm> queue;
    std::vector<Perm> group;
    const Perm id = perm_identity(space->size());
    seen.insert(id);
    queue.push_back(id);
    while (!queue.empty()) {
        Perm cur = std::move(queue.front());
        queue.pop_front();
        group.push_back(cur);
        for (std::size_t g = 0; g < action.arity(); ++g) {
            Perm nxt = perm_compose(action.gen(g), cur);
            if (seen.insert(nxt).second) {
                if (seen.size() > max_group_order)
                    throw ResourceError("image group exceeds the enumeration budget of " +
                                        std::to_string(max_group_order) + " elements");
                queue.push_back(std::move(nxt));
            }
        }
    }
    // Point-stabilizer partition: atoms with the same set of fixing elements.
    std::map<std::vector<bool>, std::uint32_t> stab_block;
    std::vector<std::uint32_t> block_of(space->size());
    std::uint32_t next = 0;
    for (std::size_t x = 0; x < space->size(); ++x) {
        std::vector<bool> sig(group.size());
        for (std::size_t gi = 0; gi < group.size(); ++gi) sig[gi] = group[gi][x] == x;
        auto [it, inserted] = stab_block.emplace(std::move(sig), next);
        if (inserted) ++next;
        block_of[x] = it->second;
    }
    Subalgebra stab_partition(space, std::move(block_of));
    std::vector<Event> translates;
    for (const Perm& g : group)
        for (const Event& e : events) {
            Mask m(space->size());
            for (auto x : e.atoms()) m.set(g[x]);
            translates.emplace_back(space, std::move(m));
        }
    return DefinableClosure{
        join_subalgebra(generated_subalgebra(space, translates), stab_partition), group.size()};
}

} // namespace finact
