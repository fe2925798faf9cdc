#include "finact/irs.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "finact/errors.hpp"

namespace finact {

namespace {

RootedSchreierClass pad_class(RootedSchreierClass c, std::size_t arity) {
    while (c.table.size() < arity) {
        std::vector<std::uint32_t> id(c.size);
        for (std::uint32_t v = 0; v < c.size; ++v) id[v] = v;
        c.table.push_back(std::move(id));
    }
    return c;
}

std::vector<std::pair<RootedSchreierClass, Rat>> padded_classes(const EmpiricalIRS& irs,
                                                                std::size_t arity) {
    std::vector<std::pair<RootedSchreierClass, Rat>> out;
    out.reserve(irs.classes.size());
    for (const auto& [c, m] : irs.classes) out.emplace_back(pad_class(c, arity), m);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void check_query(const CylinderQuery& q) {
    for (const Word& f : q.fix_words)
        for (const Word& g : q.supp_words)
            if (f == g)
                throw PreconditionError("cylinder query: word required both in and out");
}

} // namespace

Rat EmpiricalIRS::mass_of(const RootedSchreierClass& c) const {
    const auto it = std::lower_bound(
        classes.begin(), classes.end(), c,
        [](const auto& entry, const RootedSchreierClass& key) { return entry.first < key; });
    if (it != classes.end() && it->first == c) return it->second;
    return 0;
}

std::string EmpiricalIRS::encode() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out << ';';
        out << classes[i].first.encode() << '=' << rat_str(classes[i].second);
    }
    return out.str();
}

EmpiricalIRS empirical_irs(const Action& action, std::size_t arity) {
    if (arity == 0) arity = action.arity();
    std::map<RootedSchreierClass, Rat> masses;
    for (std::uint32_t x = 0; x < action.space()->size(); ++x)
        masses[canonical_rooted_schreier(action, x, arity)] += action.space()->weight(x);
    EmpiricalIRS irs;
    irs.arity = arity;
    irs.classes.assign(masses.begin(), masses.end());
    return irs;
}

bool irs_equal(const EmpiricalIRS& a, const EmpiricalIRS& b) {
    return !irs_first_difference(a, b).has_value();
}

std::optional<IrsDifference> irs_first_difference(const EmpiricalIRS& a, const EmpiricalIRS& b) {
    const std::size_t arity = std::max(a.arity, b.arity);
    const auto ca = padded_classes(a, arity);
    const auto cb = padded_classes(b, arity);
    std::size_t i = 0, j = 0;
    while (i < ca.size() || j < cb.size()) {
        if (j == cb.size() || (i < ca.size() && ca[i].first < cb[j].first)) {
            return IrsDifference{ca[i].first, ca[i].second, 0};
        }
        if (i == ca.size() || cb[j].first < ca[i].first) {
            return IrsDifference{cb[j].first, 0, cb[j].second};
        }
        if (ca[i].second != cb[j].second)
            return IrsDifference{ca[i].first, ca[i].second, cb[j].second};
        ++i;
        ++j;
    }
    return std::nullopt;
}

Rat irs_cylinder(const Action& action, const CylinderQuery& q) {
    check_query(q);
    Event e = Event::full(action.space());
    for (const Word& w : q.fix_words) e = e & fixed_event(action, w);
    for (const Word& w : q.supp_words) e = e & ~fixed_event(action, w);
    const Rat direct = e.measure();
    if (direct != irs_cylinder_incl_excl(action, q))
        throw std::logic_error("irs_cylinder: inclusion-exclusion mismatch");
    return direct;
}

Rat irs_cylinder_incl_excl(const Action& action, const CylinderQuery& q) {
    check_query(q);
    const std::size_t g = q.supp_words.size();
    if (g > 20)
        throw ResourceError("irs_cylinder_incl_excl: " + std::to_string(g) +
                            " excluded words exceed the cap 20");
    Rat total = 0;
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << g); ++sub) {
        Event e = Event::full(action.space());
        for (const Word& w : q.fix_words) e = e & fixed_event(action, w);
        int bits = 0;
        for (std::size_t i = 0; i < g; ++i)
            if (sub >> i & 1) {
                e = e & fixed_event(action, q.supp_words[i]);
                ++bits;
            }
        total += (bits % 2 == 0 ? e.measure() : -e.measure());
    }
    return total;
}

Rat irs_cylinder_mass(const EmpiricalIRS& irs, const CylinderQuery& q) {
    check_query(q);
    Rat total = 0;
    for (const auto& [c, m] : irs.classes) {
        bool ok = true;
        for (const Word& w : q.fix_words)
            if (!word_loops(c, w)) {
                ok = false;
                break;
            }
        for (const Word& w : q.supp_words)
            if (ok && word_loops(c, w)) ok = false;
        if (ok) total += m;
    }
    return total;
}

Rat supp_cylinder_mass(const EmpiricalIRS& irs, const std::vector<Word>& words) {
    Rat total = 0;
    for (const auto& [c, m] : irs.classes) {
        bool moved_by_all = true;
        for (const Word& w : words)
            if (word_loops(c, w)) {
                moved_by_all = false;
                break;
            }
        if (moved_by_all) total += m;
    }
    return total;
}

IrsFactor irs_factor(const Action& action, std::size_t arity) {
    if (arity == 0) arity = action.arity();
    const std::size_t n = action.space()->size();
    std::vector<RootedSchreierClass> per_atom;
    per_atom.reserve(n);
    for (std::uint32_t x = 0; x < n; ++x)
        per_atom.push_back(canonical_rooted_schreier(action, x, arity));

    std::map<RootedSchreierClass, std::uint32_t> index;
    for (const auto& c : per_atom) index.emplace(c, 0);
    std::vector<RootedSchreierClass> classes;
    std::vector<Rat> masses(index.size(), Rat(0));
    for (auto& [c, id] : index) {
        id = static_cast<std::uint32_t>(classes.size());
        classes.push_back(c);
    }
    std::vector<std::uint32_t> atom_class(n);
    for (std::uint32_t x = 0; x < n; ++x) {
        atom_class[x] = index.at(per_atom[x]);
        masses[atom_class[x]] += action.space()->weight(x);
    }

    // Transport: class-of(g x) must depend on class-of(x) alone.
    std::vector<Perm> gens(action.arity());
    for (std::size_t i = 0; i < action.arity(); ++i) {
        std::vector<std::int64_t> img(classes.size(), -1);
        for (std::uint32_t x = 0; x < n; ++x) {
            const std::uint32_t from = atom_class[x];
            const std::uint32_t to = atom_class[action.gen(i)[x]];
            if (img[from] < 0) img[from] = to;
            else if (img[from] != to)
                throw std::logic_error("irs_factor: class transport is not well defined");
        }
        gens[i].resize(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c)
            gens[i][c] = static_cast<std::uint32_t>(img[c]);
    }

    Action class_action(AtomSpace::create(masses), action.gen_names(), std::move(gens));
    FactorMap to_classes{action, class_action, atom_class};
    return IrsFactor{std::move(class_action), std::move(to_classes), std::move(classes)};
}

} // namespace finact
