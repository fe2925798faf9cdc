#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finact/action.hpp"
#include "finact/irs.hpp"

namespace finact {

// S-expression formulas over a measure algebra carrying a pmp action.
//
// Terms (event-valued):
//   x                      variable
//   0 | 1                  empty / full event
//   (or t ...)             join        (and t ...)  meet       (not t)  complement
//   (w WORD t)             word application
// Reals:
//   P/Q or N               rational literal
//   (mu t)                 measure     (d t1 t2)    mu(t1 symdiff t2)
//   (neg f)                1 - f       (abs f)      |f|
//   (+ f1 f2) (- f1 f2)    exact sum / difference
//   (* P/Q f)              rational scaling
//   (min f ...) (max f ...)
//   (sup x f) (inf x f)    quantifier over every event of the space
//   (sup x @name f)        quantifier over a named subalgebra's events
//
// WORD is generator names joined with '.', apostrophe for inverse ("a.b'.a"),
// "e" for the identity. Names the action does not bear act as the identity.

struct FTerm {
    enum class Kind { var, empty, full, join, meet, complement, word };
    Kind kind = Kind::empty;
    std::string var;  // kind == var
    std::string word; // kind == word, textual form
    std::vector<FTerm> args;
};

struct Formula {
    enum class Kind { rational, mu, dist, neg, abs, add, sub, scale, min, max, sup, inf };
    Kind kind = Kind::rational;
    Rat value;          // rational literal / scale coefficient
    std::string var;    // sup/inf bound variable
    std::string domain; // sup/inf named domain; empty = full algebra
    std::vector<FTerm> terms;  // mu: 1, dist: 2
    std::vector<Formula> args; // connective arguments / quantifier body
};

// Throws ParseError with a character position on malformed input.
Formula parse_formula(const std::string& text);

// Letters resolved through the name list; unknown names are appended after
// the listed ones, so they index generators beyond any action's arity and
// act as the identity.
Word parse_word(const std::string& text, const std::vector<std::string>& names);

using Assignment = std::map<std::string, Event>;
using DomainMap = std::map<std::string, Subalgebra>;

// Compositional evaluation; sup/inf scan the named domain exhaustively.
// Unbound variable or unknown domain name: precondition error. Quantifier
// domain larger than max_enum events: resource error naming the size.
Rat eval_formula(const Action& action, const Formula& f, const Assignment& assignment = {},
                 const DomainMap& domains = {}, std::size_t max_enum = 4096);

// Lipschitz modulus of f in one free variable: |f(a) - f(a')| is at most
// modulus * mu(a symdiff a') when only var changes. Terms: var occurrences
// count 1 each through join/meet/complement/word; mu has its term's modulus,
// d the sum; affine combinations scale by |coefficient|; min/max/sup/inf
// take the max over arguments (quantifiers bind their own variable).
Rat formula_modulus(const Formula& f, const std::string& var);

struct AxiomEntry {
    std::string name;
    Rat computed;
    Rat target;
    bool pass = false;
    std::string witness; // failing entries: the assignment that attains computed
};

struct AxiomReport {
    bool all_pass = true;
    std::vector<AxiomEntry> entries;
};

// Validates the action axioms exactly (measure preservation, join/meet
// preservation, surjectivity, identity word, composition over the tested
// word pool) and, per word set F in f_list, compares the attained supremum
// sup mu of the conjunction of support terms t_w(a_w) -- reached at the
// greedy maximal bases -- against theta's supp-form cylinder mass.
AxiomReport check_theta_axioms(const Action& action, const EmpiricalIRS& theta,
                               const std::vector<std::vector<Word>>& f_list);

// Two mixtures of kappa1 and kappa2 with equal class distributions that a
// quantifier-free formula over the common 3-block subalgebra cannot tell
// apart, yet mu(a meet the supports of F) does.
struct QeDemoReport {
    Action alpha, beta;
    Event a_alpha, b_alpha, c_alpha; // invariant blocks of alpha
    Event a_beta, b_beta, c_beta;    // the corresponding blocks of beta
    std::vector<Word> f;             // distinguishing word set
    Rat value_alpha, value_beta;     // mu(a meet supports of f) per side
};

// Requires t in (0, 1/2] and distinct class distributions for kappa1 and
// kappa2 (equal distributions make the demo degenerate: precondition error).
// alpha = kappa1|kappa2|kappa2 and beta = kappa2|kappa1|kappa2 on blocks of
// mass t, t, 1-2t; both realize the mixture t theta1 + (1-t) theta2. The
// distinguishing set is searched over subsets of size at most 2 of the
// reduced words of length at most 3.
QeDemoReport qe_failure_demo(const Action& kappa1, const Action& kappa2, const Rat& t);

struct ContinuityProbe {
    Rat distance; // uniform action distance between alpha and beta
    Rat gap;      // max over the samples of |f^alpha - f^beta|
};

// Evaluates f under both actions on every sample assignment. For atomic
// formulas the Lipschitz chain gap <= (total word letters) * distance is
// additionally enforced.
ContinuityProbe formula_continuity_probe(const Formula& f, const Action& alpha,
                                         const Action& beta,
                                         const std::vector<Assignment>& assignments,
                                         const DomainMap& domains = {},
                                         std::size_t max_enum = 4096);

} // namespace finact
