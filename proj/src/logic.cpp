#include "finact/logic.hpp"

#include <algorithm>
#include <cctype>

#include "finact/errors.hpp"

namespace finact {

namespace {

struct Tok {
    enum class T { open, close, atom };
    T t;
    std::string text;
    std::size_t pos;
};

std::vector<Tok> lex(const std::string& s) {
    std::vector<Tok> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({Tok::T::open, "(", i});
            ++i;
        } else if (c == ')') {
            out.push_back({Tok::T::close, ")", i});
            ++i;
        } else {
            std::size_t j = i;
            while (j < s.size() && s[j] != '(' && s[j] != ')' &&
                   !std::isspace(static_cast<unsigned char>(s[j])))
                ++j;
            out.push_back({Tok::T::atom, s.substr(i, j - i), i});
            i = j;
        }
    }
    return out;
}

bool rational_shaped(const std::string& t) {
    std::size_t i = t.size() && t[0] == '-' ? 1 : 0;
    if (i == t.size()) return false;
    bool digits = false, slash = false, den = false;
    for (; i < t.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(t[i]))) {
            (slash ? den : digits) = true;
        } else if (t[i] == '/' && !slash && digits) {
            slash = true;
        } else {
            return false;
        }
    }
    return digits && (!slash || den);
}

Rat parse_rat(const std::string& text, std::size_t pos) {
    if (!rational_shaped(text))
        throw ParseError("expected a rational literal at position " + std::to_string(pos) +
                         ", got '" + text + "'");
    const auto slash = text.find('/');
    if (slash != std::string::npos &&
        text.find_first_not_of('0', slash + 1) == std::string::npos)
        throw ParseError("zero denominator at position " + std::to_string(pos));
    Rat r(text, 10);
    r.canonicalize();
    return r;
}

struct Parser {
    const std::vector<Tok>& toks;
    std::size_t i = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
        throw ParseError(msg + " at position " + std::to_string(pos));
    }
    const Tok& take(const char* what) {
        if (i >= toks.size())
            throw ParseError(std::string("unexpected end of input, expected ") + what);
        return toks[i++];
    }
    void close() {
        const Tok& t = take("')'");
        if (t.t != Tok::T::close) fail("expected ')'", t.pos);
    }
    std::string atom(const char* what) {
        const Tok& t = take(what);
        if (t.t != Tok::T::atom) fail(std::string("expected ") + what, t.pos);
        return t.text;
    }
    bool at_close() const { return i < toks.size() && toks[i].t == Tok::T::close; }

    FTerm term() {
        const Tok& t = take("a term");
        if (t.t == Tok::T::close) fail("expected a term", t.pos);
        if (t.t == Tok::T::atom) {
            if (t.text == "0") return FTerm{FTerm::Kind::empty, "", "", {}};
            if (t.text == "1") return FTerm{FTerm::Kind::full, "", "", {}};
            if (rational_shaped(t.text)) fail("expected a term, got a number", t.pos);
            return FTerm{FTerm::Kind::var, t.text, "", {}};
        }
        const std::size_t hpos = i < toks.size() ? toks[i].pos : t.pos;
        const std::string head = atom("an operator");
        FTerm out;
        if (head == "or" || head == "and") {
            out.kind = head == "or" ? FTerm::Kind::join : FTerm::Kind::meet;
            do out.args.push_back(term());
            while (!at_close());
        } else if (head == "not") {
            out.kind = FTerm::Kind::complement;
            out.args.push_back(term());
        } else if (head == "w") {
            out.kind = FTerm::Kind::word;
            out.word = atom("a word");
            out.args.push_back(term());
        } else {
            fail("unknown term operator '" + head + "'", hpos);
        }
        close();
        return out;
    }

    Formula real() {
        const Tok& t = take("a formula");
        if (t.t == Tok::T::close) fail("expected a formula", t.pos);
        if (t.t == Tok::T::atom) {
            Formula f;
            f.kind = Formula::Kind::rational;
            f.value = parse_rat(t.text, t.pos);
            return f;
        }
        const std::size_t hpos = i < toks.size() ? toks[i].pos : t.pos;
        const std::string head = atom("an operator");
        Formula f;
        if (head == "mu") {
            f.kind = Formula::Kind::mu;
            f.terms.push_back(term());
        } else if (head == "d") {
            f.kind = Formula::Kind::dist;
            f.terms.push_back(term());
            f.terms.push_back(term());
        } else if (head == "neg" || head == "abs") {
            f.kind = head == "neg" ? Formula::Kind::neg : Formula::Kind::abs;
            f.args.push_back(real());
        } else if (head == "+" || head == "-") {
            f.kind = head == "+" ? Formula::Kind::add : Formula::Kind::sub;
            f.args.push_back(real());
            f.args.push_back(real());
        } else if (head == "*") {
            f.kind = Formula::Kind::scale;
            const Tok& c = take("a rational coefficient");
            if (c.t != Tok::T::atom) fail("expected a rational coefficient", c.pos);
            f.value = parse_rat(c.text, c.pos);
            f.args.push_back(real());
        } else if (head == "min" || head == "max") {
            f.kind = head == "min" ? Formula::Kind::min : Formula::Kind::max;
            do f.args.push_back(real());
            while (!at_close());
        } else if (head == "sup" || head == "inf") {
            f.kind = head == "sup" ? Formula::Kind::sup : Formula::Kind::inf;
            f.var = atom("a variable");
            if (i < toks.size() && toks[i].t == Tok::T::atom && toks[i].text.size() > 1 &&
                toks[i].text[0] == '@')
                f.domain = toks[i++].text.substr(1);
            f.args.push_back(real());
        } else {
            fail("unknown operator '" + head + "'", hpos);
        }
        close();
        return f;
    }
};

struct EvalCtx {
    const Action& act;
    const DomainMap& domains;
    std::size_t max_enum;
};

Event eval_term(const EvalCtx& cx, const FTerm& t, const Assignment& asg) {
    switch (t.kind) {
        case FTerm::Kind::var: {
            const auto it = asg.find(t.var);
            if (it == asg.end()) throw PreconditionError("unbound variable '" + t.var + "'");
            return it->second;
        }
        case FTerm::Kind::empty:
            return Event::empty(cx.act.space());
        case FTerm::Kind::full:
            return Event::full(cx.act.space());
        case FTerm::Kind::join: {
            Event e = eval_term(cx, t.args[0], asg);
            for (std::size_t i = 1; i < t.args.size(); ++i) e = e | eval_term(cx, t.args[i], asg);
            return e;
        }
        case FTerm::Kind::meet: {
            Event e = eval_term(cx, t.args[0], asg);
            for (std::size_t i = 1; i < t.args.size(); ++i) e = e & eval_term(cx, t.args[i], asg);
            return e;
        }
        case FTerm::Kind::complement:
            return ~eval_term(cx, t.args[0], asg);
        case FTerm::Kind::word:
            return cx.act.apply(parse_word(t.word, cx.act.gen_names()),
                                eval_term(cx, t.args[0], asg));
    }
    throw std::logic_error("unhandled term kind");
}

std::vector<Event> quantifier_domain(const EvalCtx& cx, const Formula& f) {
    if (f.domain.empty()) {
        const std::size_t n = cx.act.space()->size();
        if (n >= 64 || (std::size_t{1} << n) > cx.max_enum)
            throw ResourceError("quantifier over '" + f.var + "' enumerates 2^" +
                                std::to_string(n) + " events; the cap is " +
                                std::to_string(cx.max_enum));
        std::vector<Event> out;
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
            Mask m(n);
            for (std::size_t x = 0; x < n; ++x)
                if (bits >> x & 1) m.set(x);
            out.emplace_back(cx.act.space(), std::move(m));
        }
        return out;
    }
    const auto it = cx.domains.find(f.domain);
    if (it == cx.domains.end())
        throw PreconditionError("unknown quantifier domain '@" + f.domain + "'");
    if (!same_space(it->second.space(), cx.act.space()))
        throw PreconditionError("quantifier domain '@" + f.domain +
                                "' lives on a different space");
    const std::uint32_t bc = it->second.block_count();
    if (bc >= 64 || (std::size_t{1} << bc) > cx.max_enum)
        throw ResourceError("quantifier over '" + f.var + "' enumerates 2^" +
                            std::to_string(bc) + " events; the cap is " +
                            std::to_string(cx.max_enum));
    return it->second.events(cx.max_enum);
}

Rat eval_real(const EvalCtx& cx, const Formula& f, const Assignment& asg) {
    switch (f.kind) {
        case Formula::Kind::rational:
            return f.value;
        case Formula::Kind::mu:
            return eval_term(cx, f.terms[0], asg).measure();
        case Formula::Kind::dist:
            return (eval_term(cx, f.terms[0], asg) ^ eval_term(cx, f.terms[1], asg)).measure();
        case Formula::Kind::neg:
            return Rat(1 - eval_real(cx, f.args[0], asg));
        case Formula::Kind::abs: {
            const Rat v = eval_real(cx, f.args[0], asg);
            return v < 0 ? Rat(-v) : v;
        }
        case Formula::Kind::add:
            return Rat(eval_real(cx, f.args[0], asg) + eval_real(cx, f.args[1], asg));
        case Formula::Kind::sub:
            return Rat(eval_real(cx, f.args[0], asg) - eval_real(cx, f.args[1], asg));
        case Formula::Kind::scale:
            return Rat(f.value * eval_real(cx, f.args[0], asg));
        case Formula::Kind::min:
        case Formula::Kind::max: {
            Rat v = eval_real(cx, f.args[0], asg);
            for (std::size_t i = 1; i < f.args.size(); ++i) {
                const Rat w = eval_real(cx, f.args[i], asg);
                if (f.kind == Formula::Kind::min ? w < v : w > v) v = w;
            }
            return v;
        }
        case Formula::Kind::sup:
        case Formula::Kind::inf: {
            const std::vector<Event> dom = quantifier_domain(cx, f);
            Assignment inner = asg;
            inner.insert_or_assign(f.var, dom[0]);
            Rat best = eval_real(cx, f.args[0], inner);
            for (std::size_t i = 1; i < dom.size(); ++i) {
                inner.insert_or_assign(f.var, dom[i]);
                const Rat v = eval_real(cx, f.args[0], inner);
                if (f.kind == Formula::Kind::sup ? v > best : v < best) best = v;
            }
            return best;
        }
    }
    throw std::logic_error("unhandled formula kind");
}

Rat term_modulus(const FTerm& t, const std::string& var) {
    switch (t.kind) {
        case FTerm::Kind::var:
            return t.var == var ? Rat(1) : Rat(0);
        case FTerm::Kind::empty:
        case FTerm::Kind::full:
            return Rat(0);
        case FTerm::Kind::join:
        case FTerm::Kind::meet: {
            Rat m = 0;
            for (const FTerm& a : t.args) m += term_modulus(a, var);
            return m;
        }
        case FTerm::Kind::complement:
        case FTerm::Kind::word:
            return term_modulus(t.args[0], var);
    }
    throw std::logic_error("unhandled term kind");
}

// Total word letters applied along the term; bounds the evaluation shift
// between two actions at distance d by (letters) * d.
std::size_t term_letters(const FTerm& t, const std::vector<std::string>& names) {
    switch (t.kind) {
        case FTerm::Kind::var:
        case FTerm::Kind::empty:
        case FTerm::Kind::full:
            return 0;
        case FTerm::Kind::join:
        case FTerm::Kind::meet: {
            std::size_t m = 0;
            for (const FTerm& a : t.args) m += term_letters(a, names);
            return m;
        }
        case FTerm::Kind::complement:
            return term_letters(t.args[0], names);
        case FTerm::Kind::word:
            return parse_word(t.word, names).length() + term_letters(t.args[0], names);
    }
    throw std::logic_error("unhandled term kind");
}

std::string event_str(const Event& e) {
    std::string out = "{";
    bool first = true;
    for (const std::uint32_t x : e.atoms()) {
        if (!first) out += ",";
        out += std::to_string(x);
        first = false;
    }
    return out + "}";
}

std::string wordset_str(const std::vector<Word>& ws, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (i) out += ",";
        out += ws[i].str(names);
    }
    return out;
}

} // namespace

Formula parse_formula(const std::string& text) {
    const std::vector<Tok> toks = lex(text);
    if (toks.empty()) throw ParseError("empty formula");
    Parser p{toks};
    Formula f = p.real();
    if (p.i != toks.size())
        throw ParseError("trailing input at position " + std::to_string(toks[p.i].pos));
    return f;
}

Word parse_word(const std::string& text, const std::vector<std::string>& names) {
    if (text == "e") return Word();
    if (text.empty()) throw ParseError("empty word");
    std::vector<std::int32_t> letters;
    std::vector<std::string> unknown;
    std::size_t i = 0;
    while (i <= text.size()) {
        const std::size_t dot = std::min(text.find('.', i), text.size());
        std::string part = text.substr(i, dot - i);
        std::int32_t sign = 1;
        if (!part.empty() && part.back() == '\'') {
            sign = -1;
            part.pop_back();
        }
        if (part.empty()) throw ParseError("empty letter in word '" + text + "'");
        std::uint32_t index = 0;
        for (std::size_t g = 0; g < names.size(); ++g)
            if (names[g] == part) index = static_cast<std::uint32_t>(g + 1);
        if (index == 0) {
            // Unlisted names act as the identity: give each a private slot
            // beyond every real generator.
            auto it = std::find(unknown.begin(), unknown.end(), part);
            if (it == unknown.end()) {
                unknown.push_back(part);
                it = unknown.end() - 1;
            }
            index = static_cast<std::uint32_t>(names.size() + 1 + (it - unknown.begin()));
        }
        letters.push_back(sign * static_cast<std::int32_t>(index));
        i = dot + 1;
    }
    return Word(std::move(letters));
}

Rat eval_formula(const Action& action, const Formula& f, const Assignment& assignment,
                 const DomainMap& domains, std::size_t max_enum) {
    const EvalCtx cx{action, domains, max_enum};
    return eval_real(cx, f, assignment);
}

Rat formula_modulus(const Formula& f, const std::string& var) {
    switch (f.kind) {
        case Formula::Kind::rational:
            return Rat(0);
        case Formula::Kind::mu:
            return term_modulus(f.terms[0], var);
        case Formula::Kind::dist:
            return Rat(term_modulus(f.terms[0], var) + term_modulus(f.terms[1], var));
        case Formula::Kind::neg:
        case Formula::Kind::abs:
            return formula_modulus(f.args[0], var);
        case Formula::Kind::add:
        case Formula::Kind::sub:
            return Rat(formula_modulus(f.args[0], var) + formula_modulus(f.args[1], var));
        case Formula::Kind::scale: {
            const Rat c = f.value < 0 ? Rat(-f.value) : f.value;
            return Rat(c * formula_modulus(f.args[0], var));
        }
        case Formula::Kind::min:
        case Formula::Kind::max: {
            Rat m = 0;
            for (const Formula& a : f.args) m = std::max(m, formula_modulus(a, var));
            return m;
        }
        case Formula::Kind::sup:
        case Formula::Kind::inf:
            return f.var == var ? Rat(0) : formula_modulus(f.args[0], var);
    }
    throw std::logic_error("unhandled formula kind");
}

AxiomReport check_theta_axioms(const Action& action, const EmpiricalIRS& theta,
                               const std::vector<std::vector<Word>>& f_list) {
    AxiomReport rep;
    const SpacePtr& sp = action.space();
    const std::size_t n = sp->size();
    const auto& names = action.gen_names();
    const auto add = [&rep](std::string name, Rat computed, Rat target, std::string witness = "") {
        const bool pass = computed == target;
        if (!pass) rep.all_pass = false;
        rep.entries.push_back(
            {std::move(name), std::move(computed), std::move(target), pass,
             pass ? std::string() : std::move(witness)});
    };

    for (std::size_t i = 0; i < action.arity(); ++i) {
        const Perm& g = action.gen(i);
        // sup_a |mu(ga) - mu(a)| is attained by collecting the atoms that
        // gain weight (or, symmetrically, those that lose it).
        Rat gain = 0, loss = 0;
        std::vector<std::uint32_t> gainers;
        for (std::uint32_t x = 0; x < n; ++x) {
            const Rat diff = sp->weight(g[x]) - sp->weight(x);
            if (diff > 0) {
                gain += diff;
                gainers.push_back(x);
            } else {
                loss -= diff;
            }
        }
        add("measure-preservation " + names[i], std::max(gain, loss), Rat(0),
            "a = " + event_str(Event::of_atoms(sp, gainers)));
        // Joins are preserved by any atomwise image; meets and surjectivity
        // additionally need the stored table to be a bijection.
        const Rat bij = perm_valid(g, n) ? Rat(0) : Rat(1);
        add("join-preservation " + names[i], Rat(0), Rat(0));
        add("meet-preservation " + names[i], bij, Rat(0), "the image table repeats an atom");
        add("surjectivity " + names[i], bij, Rat(0), "the image table misses an atom");
    }

    add("identity-word",
        uniform_distance(sp, evaluate_word(action, Word()), perm_identity(n)), Rat(0));

    // Composition law over a small pool: the generators plus the tested
    // words. Compares table composition against concatenate-then-reduce.
    std::vector<Word> pool;
    for (std::uint32_t i = 1; i <= action.arity(); ++i) pool.push_back(Word::gen(i));
    for (const auto& f : f_list)
        for (const Word& w : f)
            if (!w.is_identity() && std::find(pool.begin(), pool.end(), w) == pool.end() &&
                pool.size() < 6)
                pool.push_back(w);
    for (const Word& u : pool)
        for (const Word& v : pool)
            add("composition " + u.str(names) + "," + v.str(names),
                uniform_distance(sp,
                                 perm_compose(evaluate_word(action, u), evaluate_word(action, v)),
                                 evaluate_word(action, u * v)),
                Rat(0));

    for (const auto& f : f_list) {
        Event conj = Event::full(sp);
        Event direct = Event::full(sp);
        std::string wit;
        for (const Word& w : f) {
            const Perm p = evaluate_word(action, w);
            const SupportWitness sw = support_witness(sp, p);
            conj = conj & support_term(sp, p, sw.base);
            direct = direct & moved_event(sp, p);
            if (!wit.empty()) wit += ", ";
            wit += "a[" + w.str(names) + "] = " + event_str(sw.base);
        }
        if (!(conj == direct))
            throw std::logic_error("support terms diverge from the moved sets");
        add("theta-cylinder {" + wordset_str(f, names) + "}", conj.measure(),
            supp_cylinder_mass(theta, f), wit);
    }
    return rep;
}

namespace {

std::vector<Word> reduced_words_up_to(std::size_t arity, std::size_t max_len) {
    std::vector<Word> out;
    std::vector<std::vector<std::int32_t>> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::int32_t>> next;
        for (const auto& w : frontier)
            for (std::int32_t i = 1; i <= static_cast<std::int32_t>(arity); ++i)
                for (const std::int32_t l : {i, -i}) {
                    if (!w.empty() && w.back() == -l) continue;
                    auto e = w;
                    e.push_back(l);
                    next.push_back(std::move(e));
                }
        for (const auto& w : next) out.push_back(Word(std::vector<std::int32_t>(w)));
        frontier = std::move(next);
    }
    return out;
}

} // namespace

QeDemoReport qe_failure_demo(const Action& kappa1, const Action& kappa2, const Rat& t) {
    if (!(t > 0) || t > Rat(1, 2))
        throw PreconditionError("mixture weight must lie in (0, 1/2]");
    const std::size_t k = std::max<std::size_t>(1, std::max(kappa1.arity(), kappa2.arity()));
    if (!irs_first_difference(empirical_irs(kappa1, k), empirical_irs(kappa2, k)))
        throw PreconditionError(
            "degenerate demo: the two class distributions coincide, so every "
            "cylinder value agrees");

    const Rat rest = Rat(1 - 2 * t);
    struct Side {
        Action act;
        Event a, b, c;
    };
    const auto build = [&](const Action& on_a, const Action& on_b, const Action& on_c) {
        std::vector<Rat> w;
        std::vector<Perm> gens(k);
        const auto append = [&](const Action& part, const Rat& factor) {
            const auto base = static_cast<std::uint32_t>(w.size());
            if (factor > 0)
                for (std::uint32_t x = 0; x < part.space()->size(); ++x) {
                    w.push_back(Rat(part.space()->weight(x) * factor));
                    for (std::size_t i = 0; i < k; ++i)
                        gens[i].push_back(base + (i < part.arity() ? part.gen(i)[x] : x));
                }
            return base;
        };
        const std::uint32_t a0 = append(on_a, t);
        const std::uint32_t b0 = append(on_b, t);
        const std::uint32_t c0 = append(on_c, rest);
        const auto end = static_cast<std::uint32_t>(w.size());
        Action act = Action::with_default_names(AtomSpace::create(std::move(w)), std::move(gens));
        const auto range = [&act](std::uint32_t from, std::uint32_t to) {
            std::vector<std::uint32_t> atoms;
            for (std::uint32_t x = from; x < to; ++x) atoms.push_back(x);
            return Event::of_atoms(act.space(), atoms);
        };
        Event ea = range(a0, b0), eb = range(b0, c0), ec = range(c0, end);
        return Side{std::move(act), std::move(ea), std::move(eb), std::move(ec)};
    };

    Side left = build(kappa1, kappa2, kappa2);
    Side right = build(kappa2, kappa1, kappa2);

    // Both mixtures realize t theta1 + (1-t) theta2; the blocks are invariant
    // and carry equal masses, so the 3-block substructures are isomorphic.
    if (!irs_equal(empirical_irs(left.act, k), empirical_irs(right.act, k)))
        throw std::logic_error("mixture distributions diverge");
    for (const Side* s : {&left, &right})
        for (const Event* e : {&s->a, &s->b, &s->c})
            for (std::uint32_t i = 1; i <= k; ++i)
                if (!(s->act.apply(Word::gen(i), *e) == *e))
                    throw std::logic_error("mixture block is not invariant");

    const auto value = [&](const Action& act, const Event& block, const std::vector<Word>& f) {
        Event e = block;
        for (const Word& w : f) e = e & moved_event(act.space(), evaluate_word(act, w));
        return e.measure();
    };

    const std::vector<Word> pool = reduced_words_up_to(k, 3);
    std::vector<std::vector<Word>> candidates;
    for (const Word& w : pool) candidates.push_back({w});
    const std::size_t pair_base = std::min<std::size_t>(pool.size(), 24);
    for (std::size_t i = 0; i < pair_base; ++i)
        for (std::size_t j = i + 1; j < pair_base; ++j) candidates.push_back({pool[i], pool[j]});

    for (const auto& f : candidates) {
        const Rat va = value(left.act, left.a, f);
        const Rat vb = value(right.act, right.a, f);
        if (va != vb)
            return QeDemoReport{std::move(left.act), std::move(right.act),
                                std::move(left.a),   std::move(left.b),
                                std::move(left.c),   std::move(right.a),
                                std::move(right.b),  std::move(right.c),
                                f,                   va,
                                vb};
    }
    throw std::logic_error("no distinguishing word set within the search pool");
}

ContinuityProbe formula_continuity_probe(const Formula& f, const Action& alpha,
                                         const Action& beta,
                                         const std::vector<Assignment>& assignments,
                                         const DomainMap& domains, std::size_t max_enum) {
    if (!same_space(alpha.space(), beta.space()))
        throw PreconditionError("continuity probe requires one common space");
    ContinuityProbe out{uniform_distance(alpha, beta), Rat(0)};
    for (const Assignment& asg : assignments) {
        const Rat va = eval_formula(alpha, f, asg, domains, max_enum);
        const Rat vb = eval_formula(beta, f, asg, domains, max_enum);
        const Rat gap = va > vb ? Rat(va - vb) : Rat(vb - va);
        if (gap > out.gap) out.gap = gap;
    }
    if (f.kind == Formula::Kind::mu || f.kind == Formula::Kind::dist) {
        std::size_t letters = 0;
        for (const FTerm& t : f.terms) letters += term_letters(t, alpha.gen_names());
        if (out.gap > Rat(static_cast<long>(letters)) * out.distance)
            throw std::logic_error("Lipschitz chain violated: gap " + rat_str(out.gap) +
                                   " exceeds " + std::to_string(letters) + " letters times " +
                                   rat_str(out.distance));
    }
    return out;
}

} // namespace finact
