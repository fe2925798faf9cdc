#include "finact/graphing.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace finact {

Graphing::Graphing(Action action, std::vector<Word> words, std::vector<Event> params)
    : action_(std::move(action)), params_(std::move(params)) {
    // Close the word set under inverses and drop duplicates and identities,
    // keeping first-seen order; appended inverses follow the originals.
    for (auto& w : words) {
        if (w.is_identity()) continue;
        if (std::find(words_.begin(), words_.end(), w) == words_.end()) words_.push_back(w);
    }
    const std::size_t listed = words_.size();
    for (std::size_t i = 0; i < listed; ++i) {
        Word inv = words_[i].inverse();
        if (std::find(words_.begin(), words_.end(), inv) == words_.end())
            words_.push_back(std::move(inv));
    }
    if (words_.size() > 64)
        throw ResourceError("word set of size " + std::to_string(words_.size()) +
                            " after inverse closure exceeds the 64 color slots");
    if (params_.size() > 64)
        throw ResourceError("parameter list of size " + std::to_string(params_.size()) +
                            " exceeds the 64 color slots");
    for (const Event& p : params_) require_same_space(action_.space(), p.space(), "graphing parameters");

    for (const Word& w : words_) word_perms_.push_back(evaluate_word(action_, w));

    const std::size_t n = action_.space()->size();
    std::vector<std::map<std::uint32_t, std::uint64_t>> rows(n);
    for (std::size_t wi = 0; wi < word_perms_.size(); ++wi)
        for (std::uint32_t x = 0; x < n; ++x) {
            const std::uint32_t y = word_perms_[wi][x];
            if (y != x) rows[x][y] |= std::uint64_t{1} << wi;
        }
    adj_.resize(n);
    for (std::uint32_t x = 0; x < n; ++x) {
        adj_[x].assign(rows[x].begin(), rows[x].end());
        degree_bound_ = std::max(degree_bound_, static_cast<std::uint32_t>(adj_[x].size()));
        edge_count_ += adj_[x].size();
    }
    vcolor_.assign(n, 0);
    for (std::size_t pi = 0; pi < params_.size(); ++pi)
        for (auto x : params_[pi].atoms()) vcolor_[x] |= std::uint64_t{1} << pi;
}

std::uint64_t Graphing::edge_color(std::uint32_t x, std::uint32_t y) const {
    const auto& row = adj_.at(x);
    auto it = std::lower_bound(row.begin(), row.end(), y,
                               [](const auto& e, std::uint32_t v) { return e.first < v; });
    return (it != row.end() && it->first == y) ? it->second : 0;
}

Graphing build_schreier(Action action, std::vector<Word> words, std::vector<Event> params) {
    return Graphing(std::move(action), std::move(words), std::move(params));
}

bool EdgeSet::contains(std::uint32_t x, std::uint32_t y) const {
    return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(x, y));
}

EdgeSet make_edge_set(const Graphing& g, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> closed;
    for (auto [x, y] : pairs) {
        if (!g.has_edge(x, y))
            throw PreconditionError("(" + std::to_string(x) + "," + std::to_string(y) +
                                    ") is not an edge of the graphing");
        closed.emplace_back(x, y);
        closed.emplace_back(y, x);
    }
    std::sort(closed.begin(), closed.end());
    closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
    return EdgeSet{std::move(closed)};
}

EdgeMeasure edge_measure(const Graphing& g, const EdgeSet& z) {
    EdgeMeasure out{Rat(0), Rat(0), Rat(0)};
    for (auto [x, y] : z.pairs) {
        out.mu_left += g.space()->weight(x);
        out.mu_right += g.space()->weight(y);
    }
    if (out.mu_left != out.mu_right)
        throw PreconditionError("edge set breaks left/right measure invariance"); // unreachable for swap-closed sets
    out.mu_e = out.mu_left;
    return out;
}

Event incident_vertices(const Graphing& g, const EdgeSet& z) {
    Mask m(g.size());
    for (auto [x, y] : z.pairs) {
        m.set(x);
        m.set(y);
    }
    return Event(g.space(), std::move(m));
}

Subalgebra components(const Graphing& g, const EdgeSet& z) {
    const std::size_t n = g.size();
    std::vector<std::uint32_t> comp(n);
    std::vector<bool> seen(n, false);
    std::uint32_t next = 0;
    for (std::uint32_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::deque<std::uint32_t> queue{start};
        seen[start] = true;
        comp[start] = next;
        while (!queue.empty()) {
            const auto x = queue.front();
            queue.pop_front();
            for (const auto& [y, color] : g.neighbors(x)) {
                (void)color;
                if (seen[y] || z.contains(x, y)) continue;
                seen[y] = true;
                comp[y] = next;
                queue.push_back(y);
            }
        }
        ++next;
    }
    return Subalgebra(g.space(), std::move(comp));
}

namespace {

using UndirectedEdge = std::pair<std::uint32_t, std::uint32_t>; // x < y

std::vector<std::uint32_t> component_atoms(const Subalgebra& parts, std::uint32_t block) {
    return parts.block(block).atoms();
}

// Spanning-tree chunking: DFS tree, bottom-up accumulation cutting any child
// link that would push a chunk past the bound, then every crossing edge of
// the component joins the cut.
void greedy_cut_component(const Graphing& g, const std::vector<std::uint32_t>& verts,
                          std::uint32_t bound, std::vector<UndirectedEdge>& cut) {
    const std::size_t n = g.size();
    std::vector<bool> in_comp(n, false);
    for (auto v : verts) in_comp[v] = true;

    std::vector<std::int64_t> parent(n, -1);
    std::vector<std::vector<std::uint32_t>> children(n);
    std::vector<std::uint32_t> post;
    std::vector<bool> seen(n, false);
    const std::uint32_t root = verts.front(); // verts sorted ascending
    // Iterative DFS, neighbors in ascending order.
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    seen[root] = true;
    while (!stack.empty()) {
        auto& [v, idx] = stack.back();
        const auto& nb = g.neighbors(v);
        if (idx == nb.size()) {
            post.push_back(v);
            stack.pop_back();
            continue;
        }
        const std::uint32_t y = nb[idx++].first;
        if (seen[y]) continue;
        seen[y] = true;
        parent[y] = v;
        children[v].push_back(y);
        stack.emplace_back(y, 0);
    }

    std::vector<std::uint32_t> chunk_size(n, 1);
    std::vector<std::uint32_t> chunk_root(n);
    for (auto v : verts) chunk_root[v] = v;
    // Union by pointing at the chunk root of the parent side.
    std::vector<std::uint32_t> find_stack;
    auto find = [&](std::uint32_t v) {
        while (chunk_root[v] != v) {
            find_stack.push_back(v);
            v = chunk_root[v];
        }
        for (auto u : find_stack) chunk_root[u] = v;
        find_stack.clear();
        return v;
    };
    std::vector<UndirectedEdge> tree_cuts;
    for (auto v : post)
        for (auto c : children[v]) {
            const auto rv = find(v);
            const auto rc = find(c);
            if (chunk_size[rv] + chunk_size[rc] <= bound) {
                chunk_root[rc] = rv;
                chunk_size[rv] += chunk_size[rc];
            } else {
                tree_cuts.emplace_back(std::min(v, c), std::max(v, c));
            }
        }
    // Every component edge crossing two chunks is cut.
    for (auto v : verts)
        for (const auto& [y, color] : g.neighbors(v)) {
            (void)color;
            if (y <= v || !in_comp[y]) continue;
            if (find(v) != find(y)) cut.emplace_back(v, y);
        }
}

struct Shape {
    enum class Kind { path, cycle, general } kind;
    std::vector<std::uint32_t> walk; // vertex order along a path or cycle
};

Shape classify_component(const Graphing& g, const std::vector<std::uint32_t>& verts) {
    std::vector<std::uint32_t> ends;
    bool degrees_ok = true;
    const std::size_t n = g.size();
    std::vector<bool> in_comp(n, false);
    for (auto v : verts) in_comp[v] = true;
    auto comp_degree = [&](std::uint32_t v) {
        std::size_t d = 0;
        for (const auto& [y, c] : g.neighbors(v)) {
            (void)c;
            if (in_comp[y]) ++d;
        }
        return d;
    };
    for (auto v : verts) {
        const std::size_t d = comp_degree(v);
        if (d > 2) degrees_ok = false;
        if (d <= 1) ends.push_back(v);
    }
    Shape shape;
    if (!degrees_ok) {
        shape.kind = Shape::Kind::general;
        return shape;
    }
    auto walk_from = [&](std::uint32_t start) {
        std::vector<std::uint32_t> order{start};
        std::uint32_t prev = start, cur = start;
        while (true) {
            // Smallest unvisited neighbor; for a cycle the walk stops when it
            // would return to the start.
            std::uint32_t nxt = UINT32_MAX;
            for (const auto& [y, c] : g.neighbors(cur)) {
                (void)c;
                if (!in_comp[y] || y == prev) continue;
                if (std::find(order.begin(), order.end(), y) != order.end()) continue;
                nxt = std::min(nxt, y);
            }
            if (nxt == UINT32_MAX) break;
            order.push_back(nxt);
            prev = cur;
            cur = nxt;
        }
        return order;
    };
    if (ends.size() == 2 || verts.size() == 1) {
        shape.kind = Shape::Kind::path;
        shape.walk = walk_from(ends.size() == 2 ? std::min(ends[0], ends[1]) : verts[0]);
    } else if (ends.empty() && verts.size() >= 3) {
        shape.kind = Shape::Kind::cycle;
        shape.walk = walk_from(verts.front());
    } else {
        shape.kind = Shape::Kind::general;
        return shape;
    }
    if (shape.walk.size() != verts.size()) shape.kind = Shape::Kind::general;
    return shape;
}

void exact_cut_component(const Graphing& g, const std::vector<std::uint32_t>& verts,
                         std::uint32_t bound, std::size_t edge_cap,
                         std::vector<UndirectedEdge>& cut) {
    const Shape shape = classify_component(g, verts);
    const std::size_t len = verts.size();
    if (shape.kind == Shape::Kind::cycle) {
        // floor-free optimum: ceil(len/bound) arcs of length <= bound.
        const std::size_t pieces = (len + bound - 1) / bound;
        for (std::size_t p = 0; p < pieces; ++p) {
            const std::size_t i = std::min(p * bound + bound - 1, len - 1);
            const std::uint32_t a = shape.walk[i];
            const std::uint32_t b = shape.walk[(i + 1) % len];
            cut.emplace_back(std::min(a, b), std::max(a, b));
        }
        return;
    }
    if (shape.kind == Shape::Kind::path) {
        const std::size_t pieces = (len + bound - 1) / bound;
        for (std::size_t p = 0; p + 1 < pieces; ++p) {
            const std::size_t i = p * bound + bound - 1;
            const std::uint32_t a = shape.walk[i];
            const std::uint32_t b = shape.walk[i + 1];
            cut.emplace_back(std::min(a, b), std::max(a, b));
        }
        return;
    }
    // General shape: exhaustive search over undirected edge subsets.
    const std::size_t n = g.size();
    std::vector<bool> in_comp(n, false);
    for (auto v : verts) in_comp[v] = true;
    std::vector<UndirectedEdge> edges;
    for (auto v : verts)
        for (const auto& [y, c] : g.neighbors(v)) {
            (void)c;
            if (in_comp[y] && v < y) edges.emplace_back(v, y);
        }
    if (edges.size() > edge_cap)
        throw ResourceError("exact decomposition on a component with " +
                            std::to_string(edges.size()) + " undirected edges exceeds the cap of " +
                            std::to_string(edge_cap));
    std::map<std::uint32_t, std::uint32_t> local;
    for (std::uint32_t i = 0; i < verts.size(); ++i) local[verts[i]] = i;
    Rat best_weight;
    std::vector<UndirectedEdge> best;
    bool have_best = false;
    for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << edges.size()); ++sel) {
        // Component sizes with the selected edges removed.
        std::vector<std::vector<std::uint32_t>> local_adj(verts.size());
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
            if (sel >> ei & 1) continue;
            local_adj[local[edges[ei].first]].push_back(local[edges[ei].second]);
            local_adj[local[edges[ei].second]].push_back(local[edges[ei].first]);
        }
        std::vector<bool> seen(verts.size(), false);
        bool ok = true;
        for (std::size_t s = 0; s < verts.size() && ok; ++s) {
            if (seen[s]) continue;
            std::size_t count = 0;
            std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(s)};
            seen[s] = true;
            while (!queue.empty()) {
                const auto v = queue.front();
                queue.pop_front();
                ++count;
                for (auto y : local_adj[v])
                    if (!seen[y]) {
                        seen[y] = true;
                        queue.push_back(y);
                    }
            }
            if (count > bound) ok = false;
        }
        if (!ok) continue;
        Rat weight = 0;
        for (std::size_t ei = 0; ei < edges.size(); ++ei)
            if (sel >> ei & 1)
                weight += g.space()->weight(edges[ei].first) + g.space()->weight(edges[ei].second);
        if (!have_best || weight < best_weight) {
            have_best = true;
            best_weight = weight;
            best.clear();
            for (std::size_t ei = 0; ei < edges.size(); ++ei)
                if (sel >> ei & 1) best.push_back(edges[ei]);
        }
    }
    cut.insert(cut.end(), best.begin(), best.end());
}

} // namespace

DecompositionCertificate hyperfinite_decomposition(const Graphing& g, std::uint32_t bound,
                                                   DecompositionStrategy strategy,
                                                   std::size_t exhaustive_edge_cap) {
    if (bound == 0) throw PreconditionError("component bound must be at least 1");
    const Subalgebra full = components(g, EdgeSet{});
    std::vector<UndirectedEdge> cut;
    for (std::uint32_t b = 0; b < full.block_count(); ++b) {
        const auto verts = component_atoms(full, b);
        if (verts.size() <= bound) continue;
        if (strategy == DecompositionStrategy::greedy)
            greedy_cut_component(g, verts, bound, cut);
        else
            exact_cut_component(g, verts, bound, exhaustive_edge_cap, cut);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs(cut.begin(), cut.end());
    EdgeSet z = make_edge_set(g, std::move(pairs));
    Subalgebra parts = components(g, z);
    for (std::uint32_t b = 0; b < parts.block_count(); ++b)
        if (parts.block(b).count() > bound)
            throw PreconditionError("decomposition left a component above the bound"); // logic guard
    return DecompositionCertificate{z, bound, edge_measure(g, z).mu_e, std::move(parts)};
}

} // namespace finact
