#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finact/canonical.hpp"
#include "finact/graphing.hpp"
#include "finact/joining.hpp"

namespace finact {

// How the downstairs cut set is chosen.
struct ZChoice {
    enum class Kind { exact, edges, bound, budget };
    Kind kind = Kind::exact;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // kind == edges
    std::uint32_t bound = 0;                                    // kind == bound
    Rat budget;                                                 // kind == budget

    // Z = empty: the result is an exact conjugacy.
    static ZChoice exact();
    // Explicit edge pairs, validated against the downstairs graphing.
    static ZChoice cut_edges(std::vector<std::pair<std::uint32_t, std::uint32_t>> e);
    // Greedy hyperfinite decomposition with component bound m.
    static ZChoice component_bound(std::uint32_t m);
    // Smallest component bound whose greedy cut has mu_E < epsilon / (2 d),
    // d the degree bound of the downstairs graphing.
    static ZChoice edge_budget(Rat epsilon);
};

// An approximate conjugacy after uniform refinement of both spaces: rho is a
// weight-preserving bijection of the refined atom sets, every tested word
// commutes with rho outside the error event, and the error measure is at most
// the certified bound.
struct ConjugacyWitness {
    Refinement alpha_refinement, beta_refinement;
    Action refined_alpha, refined_beta;
    std::vector<std::uint32_t> rho;     // refined alpha atom -> refined beta atom
    std::vector<std::uint32_t> rho_inv;
    Event error;         // refined-alpha atoms where some tested word fails
    Rat certified_bound; // min(mu(V_inc(Z)), 2 mu_E(Z)); sum for composites
    Rat delta;           // weight of every refined atom
    Rat mu_e;            // edge mass of the cut set used; sum for composites
    EdgeSet z;           // downstairs cut set (empty for composites)
    std::vector<Word> words;
    std::vector<std::pair<Event, Event>> params; // on the original spaces
};

// The factor form: pi is a factor map from beta (the extension) onto alpha,
// with paired parameter events satisfying B_i = pi^{-1}(A_i) exactly, and the
// two empirical stabilizer-class distributions equal. Components of the two
// cut Schreier graphings (Z downstairs, Z' = pi^{-1}(Z) upstairs) are matched
// class by class through canonical colored forms, weights are reconciled by a
// uniform refinement at the granularity of the water-filling pieces, and rho
// is forced position by position. The error event is contained in the refined
// preimage of V_inc(Z).
ConjugacyWitness conjugacy_witness_factor(const Action& alpha, const Action& beta,
                                          const FactorMap& pi,
                                          const std::vector<std::pair<Event, Event>>& params,
                                          const std::vector<Word>& words, const ZChoice& zc);

// Full pipeline: joins alpha and beta over their stabilizer-class factor,
// builds two factor witnesses against the joining (budgets epsilon/2 each
// when epsilon is given, Z = empty otherwise), and composes them on the
// common refinement. Without epsilon the result is an exact conjugacy.
ConjugacyWitness approximate_conjugacy(const Action& alpha, const Action& beta,
                                       const std::vector<Word>& words,
                                       const std::optional<Rat>& epsilon);

struct WitnessReport {
    bool ok = true;
    std::vector<std::string> failures;
    Rat measured_error;           // recomputed disagreement mass
    std::vector<Rat> word_errors; // per tested word, same order as the words
};

// Recomputes every invariant from scratch against the original actions:
// refinements, lifted generators, bijectivity and weight preservation of rho,
// parameter transport, per-word disagreement events, and the certified bound.
WitnessReport verify_witness(const ConjugacyWitness& w, const Action& alpha, const Action& beta,
                             const std::vector<Word>& words,
                             const std::vector<std::pair<Event, Event>>& params);

} // namespace finact
