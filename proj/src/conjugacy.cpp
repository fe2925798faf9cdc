#include "finact/conjugacy.hpp"

#include <algorithm>
#include <map>

#include "finact/errors.hpp"

namespace finact {

namespace {

constexpr unsigned long piece_cap = 5'000'000;
constexpr std::size_t component_cap = 512;

// Every atom splits into weight/delta pieces of weight delta; refined atoms
// are consecutive per source atom.
Refinement uniform_refinement(const SpacePtr& sp, const Rat& delta) {
    std::vector<std::vector<Rat>> plan(sp->size());
    for (std::uint32_t x = 0; x < sp->size(); ++x) {
        const Rat q = sp->weight(x) / delta;
        if (q.get_den() != 1)
            throw std::logic_error("refinement granularity does not divide an atom weight");
        plan[x].assign(q.get_num().get_ui(), delta);
    }
    return refine(sp, plan);
}

// g (x, p) = (g x, p); valid because generators preserve weights, so the
// piece counts agree along every orbit.
Action lift_action(const Action& a, const Refinement& r) {
    const auto& fib = r.fibers();
    std::vector<Perm> gens(a.arity());
    for (std::size_t i = 0; i < a.arity(); ++i) {
        gens[i].resize(r.refined()->size());
        for (std::uint32_t x = 0; x < a.space()->size(); ++x)
            for (std::size_t p = 0; p < fib[x].size(); ++p)
                gens[i][fib[x][p]] = fib[a.gen(i)[x]][p];
    }
    return Action(r.refined(), a.gen_names(), std::move(gens));
}

struct CompRec {
    std::vector<std::uint32_t> order; // canonical position -> atom id
    Rat weight;                       // every atom of a component has one weight
};

// Components of the cut graphing, canonicalized with cut-augmented vertex
// colors (parameter bits, then one bit per word color whose edge at the
// vertex lies in z) and grouped by class. Components arrive sorted by least
// atom id because block numbering is first-occurrence.
std::map<ColoredComponentClass, std::vector<CompRec>> classify(const Graphing& g,
                                                               const EdgeSet& z) {
    const std::size_t pbits = g.params().size();
    if (pbits + g.words().size() > 64)
        throw ResourceError("parameter and word colors exceed 64 vertex color bits");
    std::map<ColoredComponentClass, std::vector<CompRec>> out;
    const Subalgebra comps = components(g, z);
    for (std::uint32_t b = 0; b < comps.block_count(); ++b) {
        const Event verts = comps.block(b);
        ComponentView view = component_view(g, z, verts);
        for (std::size_t i = 0; i < view.verts.size(); ++i) {
            std::uint64_t cut = 0;
            for (const auto& [nbr, mask] : g.neighbors(view.verts[i]))
                if (z.contains(view.verts[i], nbr)) cut |= mask;
            if (cut != 0) view.vcolor[i] |= cut << pbits;
        }
        CanonicalComponent cc = canonical_colored_component(view, {}, component_cap);
        CompRec rec{std::move(cc.order), g.space()->weight(view.verts[0])};
        for (const std::uint32_t v : view.verts)
            if (g.space()->weight(v) != rec.weight)
                throw std::logic_error("component atoms carry unequal weights");
        out[cc.cls].push_back(std::move(rec));
    }
    return out;
}

unsigned long to_units(const Rat& q, const Rat& delta) {
    const Rat u = q / delta;
    if (u.get_den() != 1 || !u.get_num().fits_ulong_p())
        throw std::logic_error("weight is not an integer number of granularity units");
    return u.get_num().get_ui();
}

EdgeSet lifted_cut(const Graphing& up, const std::vector<std::uint32_t>& down_of,
                   const EdgeSet& z) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t y = 0; y < up.size(); ++y)
        for (const auto& [y2, mask] : up.neighbors(y)) {
            (void)mask;
            if (z.contains(down_of[y], down_of[y2])) pairs.emplace_back(y, y2);
        }
    return make_edge_set(up, pairs);
}

EdgeSet resolve_cut(const Graphing& g, const ZChoice& zc) {
    switch (zc.kind) {
        case ZChoice::Kind::exact:
            return EdgeSet{};
        case ZChoice::Kind::edges:
            return make_edge_set(g, zc.edges);
        case ZChoice::Kind::bound:
            return hyperfinite_decomposition(g, zc.bound, DecompositionStrategy::greedy).z;
        case ZChoice::Kind::budget: {
            if (zc.budget <= 0) throw PreconditionError("edge budget must be positive");
            if (g.edge_count() == 0) return EdgeSet{};
            const Rat target = zc.budget / (2 * Rat(g.degree_bound()));
            for (std::uint32_t m = 1;; ++m) {
                EdgeSet z = hyperfinite_decomposition(g, m, DecompositionStrategy::greedy).z;
                if (edge_measure(g, z).mu_e < target) return z;
            }
        }
    }
    throw std::logic_error("unhandled cut choice");
}

// Disagreement set of rho on the refined actions: atoms where some tested
// word fails to commute.
Event disagreement(const Action& ra, const Action& rb, const std::vector<std::uint32_t>& rho,
                   const std::vector<Word>& words) {
    std::vector<char> bad(rho.size(), 0);
    for (const Word& w : words) {
        const Perm pa = evaluate_word(ra, w);
        const Perm pb = evaluate_word(rb, w);
        for (std::uint32_t u = 0; u < rho.size(); ++u)
            if (rho[pa[u]] != pb[rho[u]]) bad[u] = 1;
    }
    std::vector<std::uint32_t> atoms;
    for (std::uint32_t u = 0; u < bad.size(); ++u)
        if (bad[u]) atoms.push_back(u);
    return Event::of_atoms(ra.space(), atoms);
}

Event rho_image(const Event& e, const std::vector<std::uint32_t>& rho, const SpacePtr& target) {
    std::vector<std::uint32_t> atoms;
    for (const std::uint32_t u : e.atoms()) atoms.push_back(rho[u]);
    return Event::of_atoms(target, atoms);
}

} // namespace

ZChoice ZChoice::exact() { return ZChoice{}; }

ZChoice ZChoice::cut_edges(std::vector<std::pair<std::uint32_t, std::uint32_t>> e) {
    ZChoice z;
    z.kind = Kind::edges;
    z.edges = std::move(e);
    return z;
}

ZChoice ZChoice::component_bound(std::uint32_t m) {
    ZChoice z;
    z.kind = Kind::bound;
    z.bound = m;
    return z;
}

ZChoice ZChoice::edge_budget(Rat epsilon) {
    ZChoice z;
    z.kind = Kind::budget;
    z.budget = std::move(epsilon);
    return z;
}

ConjugacyWitness conjugacy_witness_factor(const Action& alpha, const Action& beta,
                                          const FactorMap& pi,
                                          const std::vector<std::pair<Event, Event>>& params,
                                          const std::vector<Word>& words, const ZChoice& zc) {
    FactorMap p{beta, alpha, pi.map};
    const FactorCheck check = is_factor_map(p);
    if (!check.ok)
        throw PreconditionError("conjugacy witness: invalid factor map: " + check.detail);

    std::vector<Event> params_down, params_up;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!(params[i].second == p.preimage(params[i].first)))
            throw PreconditionError("parameter set " + std::to_string(i) +
                                    " is not the exact preimage of its downstairs partner");
        params_down.push_back(params[i].first);
        params_up.push_back(params[i].second);
    }

    const std::size_t k = std::max(alpha.arity(), beta.arity());
    if (const auto diff = irs_first_difference(empirical_irs(alpha, k), empirical_irs(beta, k)))
        throw PreconditionError("conjugacy witness: distributions differ at class " +
                                diff->cls.encode() + " (" + rat_str(diff->mass_a) + " vs " +
                                rat_str(diff->mass_b) + ")");

    const Graphing gd = build_schreier(alpha, words, params_down);
    const Graphing gu = build_schreier(beta, words, params_up);
    const EdgeSet z = resolve_cut(gd, zc);
    const EdgeSet zup = lifted_cut(gu, p.map, z);

    // Implied by equal distributions; checked because everything downstream
    // silently depends on it.
    for (const Word& w : words)
        if (!(fixed_event(beta, w) == p.preimage(fixed_event(alpha, w))))
            throw std::logic_error("fixed sets do not lift through the factor map");

    const auto down = classify(gd, z);
    const auto up = classify(gu, zup);
    if (down.size() != up.size())
        throw PreconditionError("component classes diverge: " + std::to_string(down.size()) +
                                " downstairs vs " + std::to_string(up.size()) + " upstairs");
    for (auto di = down.begin(), ui = up.begin(); di != down.end(); ++di, ++ui) {
        if (!(di->first == ui->first))
            throw PreconditionError("component classes diverge at class " + di->first.encode());
        Rat ma = 0, mb = 0;
        const std::size_t n = di->second[0].order.size();
        for (const CompRec& r : di->second) ma += r.weight * static_cast<long>(n);
        for (const CompRec& r : ui->second) mb += r.weight * static_cast<long>(n);
        if (ma != mb)
            throw PreconditionError("component class " + di->first.encode() +
                                    " carries mass " + rat_str(ma) + " downstairs but " +
                                    rat_str(mb) + " upstairs");
    }

    // Granularity: gcd of all water-filling piece weights, over every class.
    Rat delta = 0;
    for (auto di = down.begin(), ui = up.begin(); di != down.end(); ++di, ++ui) {
        std::size_t i = 0, j = 0;
        Rat ra = di->second[0].weight, rb = ui->second[0].weight;
        while (true) {
            const Rat piece = std::min(ra, rb);
            delta = delta == 0 ? piece : rat_gcd(delta, piece);
            ra -= piece;
            rb -= piece;
            if (ra == 0 && ++i < di->second.size()) ra = di->second[i].weight;
            if (rb == 0 && ++j < ui->second.size()) rb = ui->second[j].weight;
            if (ra == 0 || rb == 0) break;
        }
    }
    {
        const Rat total = 1 / delta;
        if (total.get_den() != 1 || !total.get_num().fits_ulong_p() ||
            total.get_num().get_ui() > piece_cap)
            throw ResourceError("refinement granularity needs more than " +
                                std::to_string(piece_cap) + " pieces");
    }

    const Refinement ralpha = uniform_refinement(alpha.space(), delta);
    const Refinement rbeta = uniform_refinement(beta.space(), delta);
    Action refined_alpha = lift_action(alpha, ralpha);
    Action refined_beta = lift_action(beta, rbeta);

    const std::size_t total = ralpha.refined()->size();
    std::vector<std::uint32_t> rho(total, 0), rho_inv(total, 0);
    const auto& fa = ralpha.fibers();
    const auto& fb = rbeta.fibers();
    for (auto di = down.begin(), ui = up.begin(); di != down.end(); ++di, ++ui) {
        const std::size_t n = di->second[0].order.size();
        // Water-filling in integer units of delta, identically per position.
        std::size_t i = 0, j = 0;
        unsigned long ua = to_units(di->second[0].weight, delta);
        unsigned long ub = to_units(ui->second[0].weight, delta);
        unsigned long pa = 0, pb = 0; // consumed units of the current pair
        while (i < di->second.size() && j < ui->second.size()) {
            const unsigned long step = std::min(ua - pa, ub - pb);
            for (unsigned long t = 0; t < step; ++t)
                for (std::size_t v = 0; v < n; ++v) {
                    const std::uint32_t ya = fa[di->second[i].order[v]][pa + t];
                    const std::uint32_t yb = fb[ui->second[j].order[v]][pb + t];
                    rho[ya] = yb;
                    rho_inv[yb] = ya;
                }
            pa += step;
            pb += step;
            if (pa == ua && ++i < di->second.size()) {
                ua = to_units(di->second[i].weight, delta);
                pa = 0;
            }
            if (pb == ub && ++j < ui->second.size()) {
                ub = to_units(ui->second[j].weight, delta);
                pb = 0;
            }
        }
        if (i != di->second.size() || j != ui->second.size())
            throw std::logic_error("water-filling left a class partially matched");
    }

    const Event error = disagreement(refined_alpha, refined_beta, rho, words);
    const EdgeMeasure em = edge_measure(gd, z);
    const Rat vinc = incident_vertices(gd, z).measure();
    const Rat certified = std::min(vinc, Rat(2 * em.mu_e));
    if (error.measure() > certified)
        throw std::logic_error("disagreement exceeds the certified bound");
    if (!(error & ~ralpha.lift(incident_vertices(gd, z))).is_empty())
        throw std::logic_error("disagreement escapes the incident-vertex lift");
    for (std::size_t i = 0; i < params.size(); ++i)
        if (!(rho_image(ralpha.lift(params[i].first), rho, rbeta.refined()) ==
              rbeta.lift(params[i].second)))
            throw std::logic_error("parameter set " + std::to_string(i) +
                                   " is not transported exactly");

    return ConjugacyWitness{ralpha,
                            rbeta,
                            std::move(refined_alpha),
                            std::move(refined_beta),
                            std::move(rho),
                            std::move(rho_inv),
                            error,
                            certified,
                            delta,
                            em.mu_e,
                            z,
                            words,
                            params};
}

ConjugacyWitness approximate_conjugacy(const Action& alpha, const Action& beta,
                                       const std::vector<Word>& words,
                                       const std::optional<Rat>& epsilon) {
    if (epsilon && *epsilon <= 0)
        throw PreconditionError("approximation budget must be positive");
    const JoinResult zeta = join_over_irs(alpha, beta);
    const ZChoice zc = epsilon ? ZChoice::edge_budget(*epsilon / 2) : ZChoice::exact();
    const ConjugacyWitness w1 = conjugacy_witness_factor(alpha, zeta.joined, zeta.p1, {}, words, zc);
    const ConjugacyWitness w2 = conjugacy_witness_factor(beta, zeta.joined, zeta.p2, {}, words, zc);

    const Rat delta = rat_gcd(w1.delta, w2.delta);
    {
        const Rat total = 1 / delta;
        if (total.get_den() != 1 || !total.get_num().fits_ulong_p() ||
            total.get_num().get_ui() > piece_cap)
            throw ResourceError("composite granularity needs more than " +
                                std::to_string(piece_cap) + " pieces");
    }
    const unsigned long f1 = to_units(w1.delta, delta);
    const unsigned long f2 = to_units(w2.delta, delta);

    const Refinement ralpha = uniform_refinement(alpha.space(), delta);
    const Refinement rbeta = uniform_refinement(beta.space(), delta);
    const Refinement rzeta = uniform_refinement(zeta.joined.space(), delta);

    // A witness rho at its own granularity, re-cut to the common one: the
    // q-th coarse piece spans fine pieces [q f, (q+1) f), offsets preserved.
    const auto lift_rho = [](const ConjugacyWitness& w, const Refinement& fine_src,
                             const Refinement& fine_dst, unsigned long f) {
        std::vector<std::uint32_t> out(fine_src.refined()->size());
        for (std::uint32_t x = 0; x < fine_src.source()->size(); ++x) {
            const auto& pieces = fine_src.fibers()[x];
            for (std::size_t pc = 0; pc < pieces.size(); ++pc) {
                const std::uint32_t coarse = w.alpha_refinement.fibers()[x][pc / f];
                const std::uint32_t img = w.rho[coarse];
                const std::uint32_t y = w.beta_refinement.source_atom(img);
                const std::size_t q = img - w.beta_refinement.fibers()[y][0];
                out[pieces[pc]] = fine_dst.fibers()[y][q * f + pc % f];
            }
        }
        return out;
    };
    const std::vector<std::uint32_t> rho1 = lift_rho(w1, ralpha, rzeta, f1);
    const std::vector<std::uint32_t> rho2 = lift_rho(w2, rbeta, rzeta, f2);
    std::vector<std::uint32_t> rho2_inv(rho2.size());
    for (std::uint32_t u = 0; u < rho2.size(); ++u) rho2_inv[rho2[u]] = u;

    std::vector<std::uint32_t> rho(rho1.size()), rho_inv(rho1.size());
    for (std::uint32_t u = 0; u < rho1.size(); ++u) {
        rho[u] = rho2_inv[rho1[u]];
        rho_inv[rho[u]] = u;
    }

    Action refined_alpha = lift_action(alpha, ralpha);
    Action refined_beta = lift_action(beta, rbeta);
    const Event error = disagreement(refined_alpha, refined_beta, rho, words);

    // Composition law: failures live over the two lifted error sets.
    const auto lift_error = [](const ConjugacyWitness& w, const Refinement& fine,
                               unsigned long f) {
        std::vector<std::uint32_t> atoms;
        for (std::uint32_t x = 0; x < fine.source()->size(); ++x) {
            const auto& pieces = fine.fibers()[x];
            for (std::size_t pc = 0; pc < pieces.size(); ++pc)
                if (w.error.contains(w.alpha_refinement.fibers()[x][pc / f]))
                    atoms.push_back(pieces[pc]);
        }
        return Event::of_atoms(fine.refined(), atoms);
    };
    const Event err1 = lift_error(w1, ralpha, f1);
    const Event err2 = lift_error(w2, rbeta, f2);
    std::vector<std::uint32_t> pulled;
    for (const std::uint32_t v : err2.atoms()) pulled.push_back(rho_inv[v]);
    const Event allowed = err1 | Event::of_atoms(ralpha.refined(), pulled);
    if (!(error & ~allowed).is_empty())
        throw std::logic_error("composite disagreement escapes the lifted error sets");
    if (!epsilon && !error.is_empty())
        throw std::logic_error("exact mode produced a non-exact conjugacy");

    const Rat certified = w1.certified_bound + w2.certified_bound;
    if (error.measure() > certified)
        throw std::logic_error("composite disagreement exceeds the certified bound");

    return ConjugacyWitness{ralpha,
                            rbeta,
                            std::move(refined_alpha),
                            std::move(refined_beta),
                            std::move(rho),
                            std::move(rho_inv),
                            error,
                            certified,
                            delta,
                            w1.mu_e + w2.mu_e,
                            EdgeSet{},
                            words,
                            {}};
}

WitnessReport verify_witness(const ConjugacyWitness& w, const Action& alpha, const Action& beta,
                             const std::vector<Word>& words,
                             const std::vector<std::pair<Event, Event>>& params) {
    WitnessReport rep;
    rep.measured_error = 0;
    const auto fail = [&rep](std::string msg) {
        rep.ok = false;
        rep.failures.push_back(std::move(msg));
    };

    if (!same_space(w.alpha_refinement.source(), alpha.space()))
        fail("left refinement is not over the left space");
    if (!same_space(w.beta_refinement.source(), beta.space()))
        fail("right refinement is not over the right space");
    if (!same_space(w.refined_alpha.space(), w.alpha_refinement.refined()) ||
        !same_space(w.refined_beta.space(), w.beta_refinement.refined()))
        fail("refined actions do not live on the refined spaces");
    const std::size_t na = w.alpha_refinement.refined()->size();
    const std::size_t nb = w.beta_refinement.refined()->size();
    if (w.rho.size() != na || w.rho_inv.size() != nb || na != nb) {
        fail("witness shape: rho covers " + std::to_string(w.rho.size()) + " and " +
             std::to_string(w.rho_inv.size()) + " atoms over spaces of sizes " +
             std::to_string(na) + " and " + std::to_string(nb));
        return rep;
    }
    if (!rep.ok) return rep;

    // The refined actions must be the lifts of the originals.
    const auto check_lift = [&](const Action& base, const Refinement& r, const Action& lifted,
                                const char* side) {
        if (lifted.arity() != base.arity()) {
            fail(std::string(side) + " refined action has the wrong arity");
            return;
        }
        for (std::size_t i = 0; i < base.arity(); ++i)
            for (std::uint32_t x = 0; x < base.space()->size(); ++x)
                for (std::size_t pc = 0; pc < r.fibers()[x].size(); ++pc)
                    if (lifted.gen(i)[r.fibers()[x][pc]] != r.fibers()[base.gen(i)[x]][pc]) {
                        fail(std::string(side) + " refined action does not lift generator " +
                             std::to_string(i) + " at atom " + std::to_string(x));
                        return;
                    }
    };
    check_lift(alpha, w.alpha_refinement, w.refined_alpha, "left");
    check_lift(beta, w.beta_refinement, w.refined_beta, "right");

    if (!perm_valid(w.rho, na)) {
        fail("rho is not a bijection");
        return rep;
    }
    for (std::uint32_t u = 0; u < na; ++u) {
        if (w.rho_inv[w.rho[u]] != u) {
            fail("rho_inv disagrees with rho at atom " + std::to_string(u));
            break;
        }
    }
    for (std::uint32_t u = 0; u < na; ++u)
        if (w.alpha_refinement.refined()->weight(u) != w.beta_refinement.refined()->weight(w.rho[u])) {
            fail("rho does not preserve the weight of atom " + std::to_string(u));
            break;
        }

    if (w.words != words) fail("tested word set differs from the witness record");
    if (w.params.size() != params.size()) {
        fail("parameter record differs from the witness record");
    } else {
        for (std::size_t i = 0; i < params.size(); ++i)
            if (!(w.params[i].first == params[i].first) ||
                !(w.params[i].second == params[i].second)) {
                fail("parameter record " + std::to_string(i) + " differs");
                break;
            }
    }
    for (std::size_t i = 0; i < w.params.size(); ++i) {
        std::vector<std::uint32_t> image;
        for (const std::uint32_t u : w.alpha_refinement.lift(w.params[i].first).atoms())
            image.push_back(w.rho[u]);
        if (!(Event::of_atoms(w.beta_refinement.refined(), image) ==
              w.beta_refinement.lift(w.params[i].second)))
            fail("parameter set " + std::to_string(i) + " is not transported onto its partner");
    }

    std::vector<char> bad(na, 0);
    for (const Word& word : words) {
        const Perm pa = evaluate_word(w.refined_alpha, word);
        const Perm pb = evaluate_word(w.refined_beta, word);
        Rat mass = 0;
        for (std::uint32_t u = 0; u < na; ++u)
            if (w.rho[pa[u]] != pb[w.rho[u]]) {
                bad[u] = 1;
                mass += w.alpha_refinement.refined()->weight(u);
            }
        rep.word_errors.push_back(mass);
    }
    std::vector<std::uint32_t> atoms;
    for (std::uint32_t u = 0; u < na; ++u)
        if (bad[u]) atoms.push_back(u);
    const Event measured = Event::of_atoms(w.alpha_refinement.refined(), atoms);
    rep.measured_error = measured.measure();
    if (!(measured == w.error)) fail("error event differs from the recomputation");
    if (rep.measured_error > w.certified_bound)
        fail("understated bound: measured " + rat_str(rep.measured_error) + " exceeds claimed " +
             rat_str(w.certified_bound));
    return rep;
}

} // namespace finact
