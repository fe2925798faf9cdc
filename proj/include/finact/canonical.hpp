#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finact/graphing.hpp"

namespace finact {

// Canonical form of a rooted orbit: breadth-first first-visit numbering from
// the root (index 0), scanning generators in fixed signed order (g1, g1',
// g2, g2', ...). Two atoms get equal tables iff a root-preserving generator-
// commuting bijection of their orbits exists; the loop words at the root are
// exactly the stabilizer.
struct RootedSchreierClass {
    std::uint32_t size = 0;
    std::vector<std::vector<std::uint32_t>> table; // table[g][v] = image of v

    bool operator==(const RootedSchreierClass& o) const {
        return size == o.size && table == o.table;
    }
    bool operator!=(const RootedSchreierClass& o) const { return !(*this == o); }
    bool operator<(const RootedSchreierClass& o) const;

    std::string encode() const; // "n:row:row:..." with comma-separated rows
};

// arity pads the table with identity rows (unlisted generators fix
// everything); must be at least the action's arity.
RootedSchreierClass canonical_rooted_schreier(const Action& action, std::uint32_t root,
                                              std::size_t arity = 0);

// The table replayed as an action on uniform atoms 0..n-1.
Action class_to_action(const RootedSchreierClass& c);

// Endpoint of the word traced through the table from start.
std::uint32_t trace_word(const RootedSchreierClass& c, const Word& w, std::uint32_t start = 0);

// Stabilizer membership: the word traces a loop at the root.
bool word_loops(const RootedSchreierClass& c, const Word& w);

// Class of the same orbit rooted at canonical index new_root.
RootedSchreierClass reroot(const RootedSchreierClass& c, std::uint32_t new_root);

// Induced bicolored graph on a vertex subset. Every color bit's edge set must
// be a partial permutation (at most one in- and one out-edge per vertex and
// bit), which holds for anything cut out of a word graphing.
struct ComponentView {
    std::vector<std::uint32_t> verts;               // original ids, ascending
    std::vector<std::uint64_t> vcolor;              // parallel to verts
    std::vector<std::vector<std::uint64_t>> ecolor; // local dense matrix, 0 = no edge

    std::size_t size() const { return verts.size(); }
};

// The subgraph induced on the atoms of verts with z removed.
ComponentView component_view(const Graphing& g, const EdgeSet& z, const Event& verts);

// Canonical encoding of a ComponentView: [n], then per canonical position k
// the vertex color followed by the edge colors to and from each earlier
// position. Minimal over all deterministic BFS vertex orders (one per root;
// scan ascending color bits, out-edge then in-edge), which suffices because
// partial-permutation colors make BFS orders complete under isomorphism.
struct ColoredComponentClass {
    std::vector<std::uint64_t> encoding;

    std::uint32_t size() const {
        return encoding.empty() ? 0 : static_cast<std::uint32_t>(encoding[0]);
    }
    bool operator==(const ColoredComponentClass& o) const { return encoding == o.encoding; }
    bool operator!=(const ColoredComponentClass& o) const { return !(*this == o); }
    bool operator<(const ColoredComponentClass& o) const { return encoding < o.encoding; }

    std::string encode() const; // decimal values joined with ','
};

// The class rebuilt as a ComponentView on vertices 0..n-1 in canonical order.
ComponentView class_to_view(const ColoredComponentClass& c);

struct PinConstraint {
    std::uint32_t vertex;   // original id
    std::uint32_t position; // required canonical position
};

struct CanonicalComponent {
    ColoredComponentClass cls;
    std::vector<std::uint32_t> order; // order[position] = original vertex id
};

// Minimal encoding plus one deterministic isomorphism onto it. With a pin the
// minimum runs over orders placing the pinned vertex at the pinned position
// (unsatisfiable pin: no-isomorphism error).
CanonicalComponent canonical_colored_component(const ComponentView& view,
                                               std::optional<PinConstraint> pin = {},
                                               std::size_t size_bound = 64);

// Deterministic isomorphism of view onto target (vertex at order[p] occupies
// position p), honoring the pin; throws NoIsomorphismError if none exists.
CanonicalComponent isomorphism_onto(const ComponentView& view, const ColoredComponentClass& target,
                                    std::optional<PinConstraint> pin = {});

} // namespace finact
