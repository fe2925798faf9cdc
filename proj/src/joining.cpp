#include "finact/joining.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "finact/errors.hpp"

namespace finact {

namespace {

// Generator names for the identity-padded diagonal action; falls back to
// defaults when merging would collide.
std::vector<std::string> merged_names(const Action& a, const Action& b, std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) {
        if (i < a.arity()) names.push_back(a.gen_names()[i]);
        else names.push_back(b.gen_names()[i]);
    }
    std::set<std::string> uniq(names.begin(), names.end());
    if (uniq.size() != names.size()) {
        names.clear();
        for (std::size_t i = 0; i < k; ++i) names.push_back("g" + std::to_string(i + 1));
    }
    return names;
}

const Perm& padded_gen(const Action& a, std::size_t i, const Perm& ident) {
    return i < a.arity() ? a.gen(i) : ident;
}

} // namespace

Disintegration disintegrate(const FactorMap& pi) {
    const FactorCheck check = is_factor_map(pi);
    if (!check.ok && check.failure != FactorCheck::Failure::equivariance)
        throw PreconditionError("disintegrate: not measure-preserving: " + check.detail);

    const std::size_t m = pi.target.space()->size();
    Disintegration d{pi, std::vector<std::vector<std::pair<std::uint32_t, Rat>>>(m)};
    for (std::uint32_t y = 0; y < pi.source.space()->size(); ++y) {
        const std::uint32_t t = pi.map[y];
        d.fibers[t].emplace_back(y, pi.source.space()->weight(y) / pi.target.space()->weight(t));
    }
    for (std::uint32_t t = 0; t < m; ++t) {
        Rat sum = 0;
        for (const auto& [y, w] : d.fibers[t]) sum += w;
        if (sum != 1) throw std::logic_error("disintegrate: fiber does not sum to 1");
    }
    return d;
}

JoinResult independent_joining(const Action& alpha, const Action& beta, const Action& xi,
                               const FactorMap& pi1, const FactorMap& pi2) {
    // Rebind the maps to the authoritative actions, then validate.
    FactorMap q1{alpha, xi, pi1.map};
    FactorMap q2{beta, xi, pi2.map};
    for (const auto* q : {&q1, &q2}) {
        const FactorCheck check = is_factor_map(*q);
        if (!check.ok)
            throw PreconditionError("independent_joining: invalid factor map: " + check.detail);
    }

    const std::size_t na = alpha.space()->size(), nb = beta.space()->size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<Rat> weights;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> index;
    for (std::uint32_t x = 0; x < na; ++x)
        for (std::uint32_t y = 0; y < nb; ++y) {
            if (q1.map[x] != q2.map[y]) continue;
            index.emplace(std::make_pair(x, y), static_cast<std::uint32_t>(pairs.size()));
            pairs.emplace_back(x, y);
            weights.push_back(alpha.space()->weight(x) * beta.space()->weight(y) /
                              xi.space()->weight(q1.map[x]));
        }

    const std::size_t k = std::max(alpha.arity(), beta.arity());
    const Perm ident_a = perm_identity(na), ident_b = perm_identity(nb);
    std::vector<Perm> gens(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Perm& ga = padded_gen(alpha, i, ident_a);
        const Perm& gb = padded_gen(beta, i, ident_b);
        gens[i].resize(pairs.size());
        for (std::uint32_t p = 0; p < pairs.size(); ++p)
            gens[i][p] = index.at({ga[pairs[p].first], gb[pairs[p].second]});
    }

    Action joined(AtomSpace::create(weights), merged_names(alpha, beta, k), std::move(gens));

    std::vector<std::uint32_t> m1(pairs.size()), m2(pairs.size());
    for (std::uint32_t p = 0; p < pairs.size(); ++p) {
        m1[p] = pairs[p].first;
        m2[p] = pairs[p].second;
    }
    JoinResult r{joined, std::move(pairs), FactorMap{joined, alpha, std::move(m1)},
                 FactorMap{joined, beta, std::move(m2)}, xi, std::move(q1), std::move(q2)};

    // Marginal exactness, atomwise, both ways.
    std::vector<Rat> ma(na, Rat(0)), mb(nb, Rat(0));
    for (std::uint32_t p = 0; p < r.pair_atoms.size(); ++p) {
        ma[r.pair_atoms[p].first] += joined.space()->weight(p);
        mb[r.pair_atoms[p].second] += joined.space()->weight(p);
    }
    for (std::uint32_t x = 0; x < na; ++x)
        if (ma[x] != alpha.space()->weight(x))
            throw std::logic_error("independent_joining: left marginal mismatch");
    for (std::uint32_t y = 0; y < nb; ++y)
        if (mb[y] != beta.space()->weight(y))
            throw std::logic_error("independent_joining: right marginal mismatch");
    if (!is_factor_map(r.p1).ok || !is_factor_map(r.p2).ok)
        throw std::logic_error("independent_joining: projection is not a factor map");
    return r;
}

JoinResult join_over_irs(const Action& alpha, const Action& beta) {
    const std::size_t k = std::max(alpha.arity(), beta.arity());
    const auto diff = irs_first_difference(empirical_irs(alpha, k), empirical_irs(beta, k));
    if (diff)
        throw PreconditionError("join_over_irs: distributions differ at class " +
                                diff->cls.encode() + " (" + rat_str(diff->mass_a) + " vs " +
                                rat_str(diff->mass_b) + ")");

    IrsFactor fa = irs_factor(alpha, k);
    IrsFactor fb = irs_factor(beta, k);
    if (fa.classes != fb.classes)
        throw std::logic_error("join_over_irs: class atlases diverge despite equal distributions");
    for (std::size_t i = 0; i < k; ++i)
        if (fa.class_action.gen(i) != fb.class_action.gen(i))
            throw std::logic_error("join_over_irs: class transports diverge");

    JoinResult r = independent_joining(alpha, beta, fa.class_action, fa.to_classes, fb.to_classes);

    // Three-way stabilizer-class identity, on every joined atom.
    for (std::uint32_t p = 0; p < r.pair_atoms.size(); ++p) {
        const auto [x, y] = r.pair_atoms[p];
        const RootedSchreierClass& cx = fa.classes[fa.to_classes(x)];
        if (cx != fb.classes[fb.to_classes(y)] ||
            cx != canonical_rooted_schreier(r.joined, p, k))
            throw std::logic_error("join_over_irs: stabilizer-class identity failed");
    }
    if (!irs_equal(empirical_irs(r.joined), empirical_irs(alpha, k)))
        throw std::logic_error("join_over_irs: joined distribution drifted");
    return r;
}

JoinResult amalgamate(const Action& m1, const Action& m2, const CommonSubalgebra& z,
                      const std::vector<Word>& required_words) {
    if (!same_space(z.z1.space(), m1.space()) || !same_space(z.z2.space(), m2.space()))
        throw DomainMismatchError("amalgamate: common subalgebra on the wrong space");
    const std::uint32_t blocks = z.z1.block_count();
    if (z.z2.block_count() != blocks || z.correspondence.size() != blocks)
        throw PreconditionError("amalgamate: block counts disagree");
    std::vector<char> hit(blocks, 0);
    for (const std::uint32_t c : z.correspondence) {
        if (c >= blocks || hit[c])
            throw PreconditionError("amalgamate: correspondence is not a bijection");
        hit[c] = 1;
    }
    for (std::uint32_t b = 0; b < blocks; ++b)
        if (z.z1.block(b).measure() != z.z2.block(z.correspondence[b]).measure())
            throw PreconditionError("amalgamate: block " + std::to_string(b) +
                                    " carries different masses on the two sides");

    // Induced block permutation of one generator slot on one side; identity
    // slots beyond the arity. Throws if some block image is not a block.
    const auto block_perm = [](const Action& act, const Subalgebra& alg, std::size_t slot) {
        Perm bp(alg.block_count());
        for (std::uint32_t b = 0; b < alg.block_count(); ++b) {
            const Event blk = alg.block(b);
            const Event img = slot < act.arity()
                                  ? act.apply(Word::gen(static_cast<std::uint32_t>(slot) + 1), blk)
                                  : blk;
            const std::uint32_t tb = alg.block_of(img.atoms().front());
            if (!(img == alg.block(tb)))
                throw PreconditionError("amalgamate: generator slot " + std::to_string(slot) +
                                        " does not permute the common blocks (block " +
                                        std::to_string(b) + ")");
            bp[b] = tb;
        }
        return bp;
    };

    const std::size_t k = std::max(m1.arity(), m2.arity());
    std::vector<Perm> xi_gens(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Perm bp1 = block_perm(m1, z.z1, i);
        const Perm bp2 = block_perm(m2, z.z2, i);
        for (std::uint32_t b = 0; b < blocks; ++b)
            if (z.correspondence[bp1[b]] != bp2[z.correspondence[b]])
                throw PreconditionError("amalgamate: generator slot " + std::to_string(i) +
                                        " permutes corresponding blocks differently (block " +
                                        std::to_string(b) + ")");
        xi_gens[i] = bp1;
    }

    // Supports of required words must be unions of corresponding blocks.
    const auto support_blocks = [](const Action& act, const Subalgebra& alg, const Word& w,
                                   std::size_t word_index) {
        const Event supp = ~fixed_event(act, w);
        std::set<std::uint32_t> ids;
        for (std::uint32_t b = 0; b < alg.block_count(); ++b) {
            const Event blk = alg.block(b);
            if ((blk & supp) == blk) ids.insert(b);
            else if (!(blk & supp).is_empty())
                throw PreconditionError("amalgamate: support of required word #" +
                                        std::to_string(word_index) +
                                        " is not a union of common blocks (block " +
                                        std::to_string(b) + ")");
        }
        return ids;
    };
    for (std::size_t wi = 0; wi < required_words.size(); ++wi) {
        const auto s1 = support_blocks(m1, z.z1, required_words[wi], wi);
        const auto s2 = support_blocks(m2, z.z2, required_words[wi], wi);
        std::set<std::uint32_t> mapped;
        for (const std::uint32_t b : s1) mapped.insert(z.correspondence[b]);
        if (mapped != s2)
            throw PreconditionError("amalgamate: required word #" + std::to_string(wi) +
                                    " is supported on non-corresponding blocks");
    }

    std::vector<Rat> masses(blocks);
    for (std::uint32_t b = 0; b < blocks; ++b) masses[b] = z.z1.block(b).measure();
    Action xi(AtomSpace::create(masses), merged_names(m1, m2, k), std::move(xi_gens));

    std::vector<std::uint32_t> map1(m1.space()->size()), map2(m2.space()->size());
    std::vector<std::uint32_t> corr_inv(blocks);
    for (std::uint32_t b = 0; b < blocks; ++b) corr_inv[z.correspondence[b]] = b;
    for (std::uint32_t x = 0; x < map1.size(); ++x) map1[x] = z.z1.block_of(x);
    for (std::uint32_t y = 0; y < map2.size(); ++y) map2[y] = corr_inv[z.z2.block_of(y)];

    JoinResult r = independent_joining(m1, m2, xi, FactorMap{m1, xi, map1},
                                       FactorMap{m2, xi, map2});

    // Embeddings commute over the common algebra.
    for (std::uint32_t b = 0; b < blocks; ++b)
        if (!(r.p1.preimage(z.z1.block(b)) == r.p2.preimage(z.z2.block(z.correspondence[b]))))
            throw std::logic_error("amalgamate: embeddings disagree on a common block");
    // Support preservation under both embeddings.
    for (const Word& w : required_words) {
        const Event sj = ~fixed_event(r.joined, w);
        if (!(sj == r.p1.preimage(~fixed_event(m1, w))) ||
            !(sj == r.p2.preimage(~fixed_event(m2, w))))
            throw std::logic_error("amalgamate: a required support was not preserved");
    }
    return r;
}

} // namespace finact
