#include "finact/canonical.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <sstream>

#include "finact/errors.hpp"

namespace finact {

bool RootedSchreierClass::operator<(const RootedSchreierClass& o) const {
    if (size != o.size) return size < o.size;
    return table < o.table;
}

std::string RootedSchreierClass::encode() const {
    std::ostringstream out;
    out << size;
    for (const auto& row : table) {
        out << ':';
        for (std::size_t v = 0; v < row.size(); ++v) {
            if (v) out << ',';
            out << row[v];
        }
    }
    return out.str();
}

RootedSchreierClass canonical_rooted_schreier(const Action& action, std::uint32_t root,
                                              std::size_t arity) {
    const std::size_t n = action.space()->size();
    if (root >= n) throw PreconditionError("canonical_rooted_schreier: root out of range");
    if (arity == 0) arity = action.arity();
    if (arity < action.arity())
        throw PreconditionError("canonical_rooted_schreier: arity below the action's");

    // First-visit numbering; padded identity generators never discover atoms.
    std::vector<std::int64_t> id(n, -1);
    std::vector<std::uint32_t> atom_of;
    id[root] = 0;
    atom_of.push_back(root);
    for (std::size_t head = 0; head < atom_of.size(); ++head) {
        const std::uint32_t v = atom_of[head];
        for (std::size_t i = 0; i < action.arity(); ++i) {
            for (const std::uint32_t t : {action.gen(i)[v], action.gen_inv(i)[v]}) {
                if (id[t] < 0) {
                    id[t] = static_cast<std::int64_t>(atom_of.size());
                    atom_of.push_back(t);
                }
            }
        }
    }

    RootedSchreierClass c;
    c.size = static_cast<std::uint32_t>(atom_of.size());
    c.table.resize(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        c.table[i].resize(c.size);
        for (std::uint32_t v = 0; v < c.size; ++v)
            c.table[i][v] = i < action.arity()
                                ? static_cast<std::uint32_t>(id[action.gen(i)[atom_of[v]]])
                                : v;
    }
    return c;
}

Action class_to_action(const RootedSchreierClass& c) {
    if (c.size == 0) throw PreconditionError("class_to_action: empty class");
    std::vector<Perm> gens;
    for (const auto& row : c.table) gens.push_back(row);
    return Action::with_default_names(AtomSpace::uniform(c.size), std::move(gens));
}

std::uint32_t trace_word(const RootedSchreierClass& c, const Word& w, std::uint32_t start) {
    if (start >= c.size) throw PreconditionError("trace_word: start out of range");
    std::vector<Perm> inv(c.table.size());
    std::uint32_t v = start;
    const auto& letters = w.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const std::size_t i = static_cast<std::size_t>(*it > 0 ? *it : -*it) - 1;
        if (i >= c.table.size()) continue; // unlisted generator fixes everything
        if (*it > 0) {
            v = c.table[i][v];
        } else {
            if (inv[i].empty()) inv[i] = perm_inverse(c.table[i]);
            v = inv[i][v];
        }
    }
    return v;
}

bool word_loops(const RootedSchreierClass& c, const Word& w) {
    return trace_word(c, w, 0) == 0;
}

RootedSchreierClass reroot(const RootedSchreierClass& c, std::uint32_t new_root) {
    return canonical_rooted_schreier(class_to_action(c), new_root, c.table.size());
}

ComponentView component_view(const Graphing& g, const EdgeSet& z, const Event& verts) {
    if (!same_space(verts.space(), g.space()))
        throw DomainMismatchError("component_view: event from a different space");
    ComponentView view;
    view.verts = verts.atoms();
    const std::size_t n = view.verts.size();
    view.vcolor.resize(n);
    view.ecolor.assign(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t x = view.verts[i];
        view.vcolor[i] = g.vertex_color(x);
        for (const auto& [y, mask] : g.neighbors(x)) {
            if (z.contains(x, y)) continue;
            const auto it = std::lower_bound(view.verts.begin(), view.verts.end(), y);
            if (it == view.verts.end() || *it != y) continue;
            view.ecolor[i][static_cast<std::size_t>(it - view.verts.begin())] = mask;
        }
    }
    return view;
}

namespace {

std::vector<std::uint32_t> used_bits(const ComponentView& view) {
    std::uint64_t all = 0;
    for (const auto& row : view.ecolor)
        for (const std::uint64_t m : row) all |= m;
    std::vector<std::uint32_t> bits;
    for (std::uint32_t s = 0; s < 64; ++s)
        if (all >> s & 1) bits.push_back(s);
    return bits;
}

// Per vertex and color bit: the unique out-/in-neighbor, or -1. Violations of
// the partial-permutation property (or a self loop) are precondition errors.
struct Steps {
    std::vector<std::array<std::int32_t, 64>> out, in;
};

Steps build_steps(const ComponentView& view, const std::vector<std::uint32_t>& bits) {
    const std::size_t n = view.size();
    Steps st;
    st.out.assign(n, {});
    st.in.assign(n, {});
    for (auto& row : st.out) row.fill(-1);
    for (auto& row : st.in) row.fill(-1);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const std::uint64_t m = view.ecolor[x][y];
            if (m == 0) continue;
            if (x == y) throw PreconditionError("component view: self loops unsupported");
            for (const std::uint32_t s : bits) {
                if (!(m >> s & 1)) continue;
                if (st.out[x][s] >= 0 || st.in[y][s] >= 0)
                    throw PreconditionError(
                        "component view: color " + std::to_string(s) +
                        " is not a partial permutation");
                st.out[x][s] = static_cast<std::int32_t>(y);
                st.in[y][s] = static_cast<std::int32_t>(x);
            }
        }
    return st;
}

// Deterministic BFS order from one root: ascending color bits, out before in.
std::vector<std::uint32_t> bfs_order(const Steps& st, const std::vector<std::uint32_t>& bits,
                                     std::size_t n, std::uint32_t root) {
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> order{root};
    seen[root] = 1;
    for (std::size_t head = 0; head < order.size(); ++head) {
        const std::uint32_t v = order[head];
        for (const std::uint32_t s : bits) {
            for (const std::int32_t t : {st.out[v][s], st.in[v][s]}) {
                if (t >= 0 && !seen[t]) {
                    seen[t] = 1;
                    order.push_back(static_cast<std::uint32_t>(t));
                }
            }
        }
    }
    return order;
}

std::vector<std::uint64_t> encode_order(const ComponentView& view,
                                        const std::vector<std::uint32_t>& order) {
    std::vector<std::uint64_t> enc;
    enc.reserve(1 + order.size() * order.size());
    enc.push_back(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        enc.push_back(view.vcolor[order[k]]);
        for (std::size_t j = 0; j < k; ++j) {
            enc.push_back(view.ecolor[order[j]][order[k]]);
            enc.push_back(view.ecolor[order[k]][order[j]]);
        }
    }
    return enc;
}

} // namespace

std::string ColoredComponentClass::encode() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < encoding.size(); ++i) {
        if (i) out << ',';
        out << encoding[i];
    }
    return out.str();
}

ComponentView class_to_view(const ColoredComponentClass& c) {
    ComponentView view;
    if (c.encoding.empty()) return view;
    const std::size_t n = static_cast<std::size_t>(c.encoding[0]);
    view.verts.resize(n);
    for (std::size_t v = 0; v < n; ++v) view.verts[v] = static_cast<std::uint32_t>(v);
    view.vcolor.resize(n);
    view.ecolor.assign(n, std::vector<std::uint64_t>(n, 0));
    std::size_t at = 1;
    for (std::size_t k = 0; k < n; ++k) {
        view.vcolor[k] = c.encoding.at(at++);
        for (std::size_t j = 0; j < k; ++j) {
            view.ecolor[j][k] = c.encoding.at(at++);
            view.ecolor[k][j] = c.encoding.at(at++);
        }
    }
    if (at != c.encoding.size()) throw PreconditionError("class_to_view: malformed encoding");
    return view;
}

CanonicalComponent canonical_colored_component(const ComponentView& view,
                                               std::optional<PinConstraint> pin,
                                               std::size_t size_bound) {
    const std::size_t n = view.size();
    if (n > size_bound)
        throw ResourceError("canonical_colored_component: " + std::to_string(n) +
                            " vertices exceed the bound " + std::to_string(size_bound));
    if (n == 0) return {ColoredComponentClass{{0}}, {}};

    std::int64_t pin_local = -1;
    if (pin) {
        if (pin->position >= n)
            throw NoIsomorphismError("pin position beyond component size");
        const auto it = std::lower_bound(view.verts.begin(), view.verts.end(), pin->vertex);
        if (it == view.verts.end() || *it != pin->vertex)
            throw PreconditionError("pin vertex not in the component");
        pin_local = it - view.verts.begin();
    }

    const auto bits = used_bits(view);
    const Steps st = build_steps(view, bits);

    std::vector<std::uint64_t> best;
    std::vector<std::uint32_t> best_order;
    for (std::uint32_t root = 0; root < n; ++root) {
        auto order = bfs_order(st, bits, n, root);
        if (order.size() < n) {
            if (root == 0) throw PreconditionError("component view is not connected");
            continue; // unreachable once connectivity holds
        }
        if (pin_local >= 0 && order[pin->position] != static_cast<std::uint32_t>(pin_local))
            continue;
        auto enc = encode_order(view, order);
        if (best.empty() || enc < best) {
            best = std::move(enc);
            best_order = std::move(order);
        }
    }
    if (best.empty())
        throw NoIsomorphismError("no vertex order satisfies the pin");
    for (auto& v : best_order) v = view.verts[v];
    return {ColoredComponentClass{std::move(best)}, std::move(best_order)};
}

CanonicalComponent isomorphism_onto(const ComponentView& view, const ColoredComponentClass& target,
                                    std::optional<PinConstraint> pin) {
    auto canon = canonical_colored_component(view, pin);
    if (canon.cls != target)
        throw NoIsomorphismError("component is not isomorphic to the target class" +
                                 std::string(pin ? " over the pin" : ""));
    return canon;
}

} // namespace finact
