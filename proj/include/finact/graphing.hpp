#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "finact/action.hpp"

namespace finact {

// Bicolored Schreier graphing of an action for a word set S: vertices are
// atoms, (x,y) is an edge iff some s in S moves x to y with y != x. Edges are
// ordered pairs; the word set is closed under inverses on construction, so
// the edge relation is symmetric. Edge color: the subset of S realizing the
// step. Vertex color: membership pattern in the parameter events.
class Graphing {
  public:
    Graphing(Action action, std::vector<Word> words, std::vector<Event> params);

    const Action& action() const { return action_; }
    const SpacePtr& space() const { return action_.space(); }
    const std::vector<Word>& words() const { return words_; }
    const std::vector<Event>& params() const { return params_; }
    const Perm& word_perm(std::size_t i) const { return word_perms_.at(i); }

    std::size_t size() const { return action_.space()->size(); }
    const std::vector<std::pair<std::uint32_t, std::uint64_t>>& neighbors(std::uint32_t x) const {
        return adj_.at(x);
    }
    // Color mask over word indices; 0 means no edge.
    std::uint64_t edge_color(std::uint32_t x, std::uint32_t y) const;
    bool has_edge(std::uint32_t x, std::uint32_t y) const { return edge_color(x, y) != 0; }
    std::uint64_t vertex_color(std::uint32_t x) const { return vcolor_.at(x); }
    std::uint32_t degree_bound() const { return degree_bound_; }
    std::size_t edge_count() const { return edge_count_; } // ordered pairs

  private:
    Action action_;
    std::vector<Word> words_;
    std::vector<Event> params_;
    std::vector<Perm> word_perms_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj_;
    std::vector<std::uint64_t> vcolor_;
    std::uint32_t degree_bound_ = 0;
    std::size_t edge_count_ = 0;
};

Graphing build_schreier(Action action, std::vector<Word> words, std::vector<Event> params = {});

// Subset of the edges, as ordered pairs closed under swap.
struct EdgeSet {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs; // sorted, unique

    bool contains(std::uint32_t x, std::uint32_t y) const;
    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// Validates that every pair is an edge, dedupes, and closes under swap.
EdgeSet make_edge_set(const Graphing& g, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

struct EdgeMeasure {
    Rat mu_e;     // the edge measure, = mu_left = mu_right
    Rat mu_left;  // sum of source weights over ordered pairs
    Rat mu_right; // sum of target weights over ordered pairs
};

EdgeMeasure edge_measure(const Graphing& g, const EdgeSet& z);

// Atoms incident to at least one pair of z.
Event incident_vertices(const Graphing& g, const EdgeSet& z);

// Connected components of the graphing with z removed.
Subalgebra components(const Graphing& g, const EdgeSet& z);

enum class DecompositionStrategy { greedy, exact };

struct DecompositionCertificate {
    EdgeSet z;
    std::uint32_t bound;    // requested component bound M
    Rat mu_e;               // edge measure of z
    Subalgebra component_partition; // components of the graphing minus z
};

// Edge set whose removal leaves every component with at most M atoms.
// greedy: spanning-tree chunking, valid but possibly suboptimal.
// exact: minimal mu_e; closed form on cycle and path components, exhaustive
// search elsewhere up to exhaustive_edge_cap undirected edges per component.
DecompositionCertificate hyperfinite_decomposition(const Graphing& g, std::uint32_t bound,
                                                   DecompositionStrategy strategy,
                                                   std::size_t exhaustive_edge_cap = 20);

} // namespace finact
