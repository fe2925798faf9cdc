// finact: batch interface over the library. One subcommand per operation,
// documents in, JSON reports out. Exit codes: 0 success (including negative
// answers to queries), 1 precondition violation or failed verification (with
// a structured report on stdout), 2 parse or usage error.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finact/conjugacy.hpp"
#include "finact/errors.hpp"
#include "finact/graphing.hpp"
#include "finact/io.hpp"
#include "finact/irs.hpp"
#include "finact/joining.hpp"
#include "finact/logic.hpp"
#include "finact/measure.hpp"

using namespace finact;
using Json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write file '" + path + "'");
    out << text;
}

ActionDocument load_doc(const std::string& path) {
    try {
        return parse_action(slurp(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i <= s.size()) {
        const std::size_t j = std::min(s.find(sep, i), s.size());
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j + 1;
    }
    return out;
}

std::vector<std::uint32_t> u32_list(const std::string& s, const char* what) {
    std::vector<std::uint32_t> out;
    for (const std::string& tok : split(s, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ParseError(std::string(what) + ": '" + tok + "' is not a number");
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

Event named_event(const ActionDocument& doc, const std::string& name) {
    for (const auto& [n, e] : doc.events)
        if (n == name) return e;
    throw PreconditionError("no event named '" + name + "' in the document");
}

std::vector<Event> named_events(const ActionDocument& doc, const std::string& list) {
    std::vector<Event> out;
    for (const std::string& name : split(list, ',')) out.push_back(named_event(doc, name));
    return out;
}

std::vector<Word> word_list(const std::string& list, const Action& a) {
    std::vector<Word> out;
    for (const std::string& tok : split(list, ',')) out.push_back(parse_word(tok, a.gen_names()));
    return out;
}

// Default test words: the single generators.
std::vector<Word> generator_words(const Action& a) {
    std::vector<Word> out;
    for (std::uint32_t i = 1; i <= a.arity(); ++i) out.push_back(Word::gen(i));
    return out;
}

Json jrat(const Rat& r) { return rat_str(r); }

Json jwords(const std::vector<Word>& ws, const std::vector<std::string>& names) {
    Json out = Json::array();
    for (const Word& w : ws) out.push_back(w.str(names));
    return out;
}

bool fraction_shaped(const std::string& s) {
    const std::size_t bar = s.find('/');
    if (bar == std::string::npos || bar == 0 || bar + 1 == s.size()) return false;
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == bar) return false;
    for (; i < s.size(); ++i)
        if (i != bar && !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string scalar_str(const Json& v) {
    if (!v.is_string()) return v.dump();
    std::string s = v.get<std::string>();
    if (fraction_shaped(s)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6g", rat_approx(rat_parse(s)));
        s += " (~" + std::string(buf) + ")";
    }
    return s;
}

void render_human(const Json& j, const std::string& ind) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_structured() && !v.empty()) {
                std::cout << ind << k << ":\n";
                render_human(v, ind + "  ");
            } else if (v.is_structured()) {
                std::cout << ind << k << ": " << (v.is_array() ? "[]" : "{}") << "\n";
            } else {
                std::cout << ind << k << ": " << scalar_str(v) << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (v.is_structured()) {
                std::cout << ind << "-\n";
                render_human(v, ind + "  ");
            } else {
                std::cout << ind << "- " << scalar_str(v) << "\n";
            }
        }
    } else {
        std::cout << ind << scalar_str(j) << "\n";
    }
}

void emit(const Json& j, bool human) {
    if (human)
        render_human(j, "");
    else
        std::cout << j.dump(2) << "\n";
}

Json irs_json(const EmpiricalIRS& irs) {
    Json classes = Json::array();
    for (const auto& [cls, mass] : irs.classes)
        classes.push_back(Json{{"class", cls.encode()}, {"mass", jrat(mass)}});
    return Json{{"arity", irs.arity}, {"class_count", irs.classes.size()}, {"classes", classes}};
}

// Blocks of generated partitions are exactly the membership-pattern classes,
// so matching the pattern across the two sides is the canonical correspondence.
std::vector<std::uint32_t> block_correspondence(const Subalgebra& z1, const std::vector<Event>& e1,
                                                const Subalgebra& z2, const std::vector<Event>& e2) {
    const auto pattern = [](const Subalgebra& z, const std::vector<Event>& evs, std::uint32_t b) {
        const std::uint32_t atom = z.block(b).atoms().front();
        std::vector<bool> key;
        for (const Event& e : evs) key.push_back(e.contains(atom));
        return key;
    };
    std::map<std::vector<bool>, std::uint32_t> of_pattern;
    for (std::uint32_t b = 0; b < z2.block_count(); ++b) of_pattern[pattern(z2, e2, b)] = b;
    std::vector<std::uint32_t> corr(z1.block_count());
    for (std::uint32_t b = 0; b < z1.block_count(); ++b) {
        const auto it = of_pattern.find(pattern(z1, e1, b));
        if (it == of_pattern.end())
            throw PreconditionError("common events do not induce matching blocks: block " +
                                    std::to_string(b) +
                                    " of the first action has no partner on the second");
        corr[b] = it->second;
    }
    return corr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finact: finite pmp actions of free groups, exact arithmetic throughout"};
    app.require_subcommand(1);
    bool human = false;
    app.add_flag("--human", human, "render reports as text with decimal approximations");

    int rc = 0;
    const auto done = [&rc](int code) { rc = code; };

    // gen
    std::string g_kind, g_sizes, g_out;
    std::uint32_t g_n = 4, g_k = 1;
    std::uint64_t g_seed = 0;
    auto* gen = app.add_subcommand("gen", "emit a generated action document");
    gen->fallthrough();
    gen->add_option("kind", g_kind, "cyclic | orbits | random | coset")->required();
    gen->add_option("--n", g_n, "atom count (cyclic, random)");
    gen->add_option("--k", g_k, "generator count (random)");
    gen->add_option("--seed", g_seed, "mt19937_64 seed (random)");
    gen->add_option("--sizes", g_sizes, "comma list: orbit sizes (orbits) or moduli (coset)");
    gen->add_option("--out", g_out, "write the document here instead of stdout");
    gen->callback([&] {
        ActionDocument doc = [&] {
            if (g_kind == "cyclic") return gen_cyclic(g_n);
            if (g_kind == "orbits") return gen_orbits(u32_list(g_sizes, "--sizes"));
            if (g_kind == "random") return gen_random(g_n, g_k, g_seed);
            if (g_kind == "coset") return gen_coset(u32_list(g_sizes, "--sizes"));
            throw ParseError("unknown kind '" + g_kind + "'; expected cyclic|orbits|random|coset");
        }();
        const std::string text = serialize_action(doc);
        if (g_out.empty()) {
            std::cout << text;
        } else {
            spill(g_out, text);
            emit(Json{{"written", g_out},
                      {"atoms", doc.action.space()->size()},
                      {"generators", doc.action.arity()}},
                 human);
        }
        done(0);
    });

    // irs
    std::string i_file;
    std::size_t i_arity = 0;
    auto* irs_cmd = app.add_subcommand("irs", "empirical stabilizer-class distribution");
    irs_cmd->fallthrough();
    irs_cmd->add_option("file", i_file)->required();
    irs_cmd->add_option("--arity", i_arity, "pad the class tables to this many generators");
    irs_cmd->callback([&] {
        emit(irs_json(empirical_irs(load_doc(i_file).action, i_arity)), human);
        done(0);
    });

    // irs-eq
    std::string ie_a, ie_b;
    std::size_t ie_arity = 0;
    auto* irs_eq = app.add_subcommand("irs-eq", "compare two class distributions");
    irs_eq->fallthrough();
    irs_eq->add_option("file_a", ie_a)->required();
    irs_eq->add_option("file_b", ie_b)->required();
    irs_eq->add_option("--arity", ie_arity);
    irs_eq->callback([&] {
        const auto da = empirical_irs(load_doc(ie_a).action, ie_arity);
        const auto db = empirical_irs(load_doc(ie_b).action, ie_arity);
        const auto diff = irs_first_difference(da, db);
        Json rep{{"equal", !diff.has_value()}};
        if (diff)
            rep["difference"] = Json{{"class", diff->cls.encode()},
                                     {"mass_a", jrat(diff->mass_a)},
                                     {"mass_b", jrat(diff->mass_b)}};
        emit(rep, human);
        done(0);
    });

    // cyl
    std::string c_file, c_fix, c_supp;
    std::size_t c_arity = 0;
    auto* cyl = app.add_subcommand("cyl", "cylinder mass: fixed words, moving words");
    cyl->fallthrough();
    cyl->add_option("file", c_file)->required();
    cyl->add_option("--fix", c_fix, "comma list of words that must fix the point");
    cyl->add_option("--supp", c_supp, "comma list of words that must move the point");
    cyl->add_option("--arity", c_arity);
    cyl->callback([&] {
        const ActionDocument doc = load_doc(c_file);
        const CylinderQuery q{word_list(c_fix, doc.action), word_list(c_supp, doc.action)};
        const Rat direct = irs_cylinder(doc.action, q);
        const Rat signed_sum = irs_cylinder_incl_excl(doc.action, q);
        const Rat of_classes = irs_cylinder_mass(empirical_irs(doc.action, c_arity), q);
        emit(Json{{"fix", jwords(q.fix_words, doc.action.gen_names())},
                  {"supp", jwords(q.supp_words, doc.action.gen_names())},
                  {"value", jrat(direct)},
                  {"incl_excl", jrat(signed_sum)},
                  {"from_distribution", jrat(of_classes)},
                  {"consistent", direct == signed_sum && direct == of_classes}},
             human);
        done(0);
    });

    // decomp
    std::string d_file, d_words, d_params, d_strategy = "greedy";
    std::uint32_t d_bound = 0;
    auto* decomp = app.add_subcommand("decomp", "hyperfinite decomposition of the Schreier graphing");
    decomp->fallthrough();
    decomp->add_option("file", d_file)->required();
    decomp->add_option("--bound", d_bound, "max atoms per remaining component")->required();
    decomp->add_option("--strategy", d_strategy, "greedy | exact");
    decomp->add_option("--words", d_words, "graphing words (default: the generators)");
    decomp->add_option("--params", d_params, "named events used as vertex colors");
    decomp->callback([&] {
        const ActionDocument doc = load_doc(d_file);
        const std::vector<Word> ws =
            d_words.empty() ? generator_words(doc.action) : word_list(d_words, doc.action);
        const Graphing g = build_schreier(doc.action, ws, named_events(doc, d_params));
        DecompositionStrategy strat;
        if (d_strategy == "greedy")
            strat = DecompositionStrategy::greedy;
        else if (d_strategy == "exact")
            strat = DecompositionStrategy::exact;
        else
            throw ParseError("unknown strategy '" + d_strategy + "'; expected greedy|exact");
        const DecompositionCertificate cert = hyperfinite_decomposition(g, d_bound, strat);
        Json cut = Json::array();
        for (const auto& [x, y] : cert.z.pairs)
            if (x < y) cut.push_back(Json::array({x, y}));
        std::size_t largest = 0;
        for (std::uint32_t b = 0; b < cert.component_partition.block_count(); ++b)
            largest = std::max(largest, cert.component_partition.block(b).count());
        emit(Json{{"bound", cert.bound},
                  {"strategy", d_strategy},
                  {"mu_e", jrat(cert.mu_e)},
                  {"cut", cut},
                  {"components", cert.component_partition.block_count()},
                  {"largest_component", largest}},
             human);
        done(0);
    });

    // du
    std::string u_a, u_b;
    auto* du = app.add_subcommand("du", "uniform distance between two actions on one space");
    du->fallthrough();
    du->add_option("file_a", u_a)->required();
    du->add_option("file_b", u_b)->required();
    du->callback([&] {
        emit(Json{{"distance", jrat(uniform_distance(load_doc(u_a).action, load_doc(u_b).action))}},
             human);
        done(0);
    });

    // support
    std::string s_file, s_word;
    auto* support = app.add_subcommand("support", "support of a word with its witness base");
    support->fallthrough();
    support->add_option("file", s_file)->required();
    support->add_option("--word", s_word)->required();
    support->callback([&] {
        const ActionDocument doc = load_doc(s_file);
        const Word w = parse_word(s_word, doc.action.gen_names());
        const Perm p = evaluate_word(doc.action, w);
        const SupportWitness sw = support_witness(doc.action.space(), p);
        emit(Json{{"word", w.str(doc.action.gen_names())},
                  {"base", sw.base.atoms()},
                  {"base_mass", jrat(sw.base.measure())},
                  {"support", sw.support.atoms()},
                  {"support_mass", jrat(sw.support.measure())},
                  {"matches_moved_set", sw.support == moved_event(doc.action.space(), p)}},
             human);
        done(0);
    });

    // indep
    std::string n_file, n_a, n_b, n_cond;
    auto* indep = app.add_subcommand("indep", "conditional independence of two event families");
    indep->fallthrough();
    indep->add_option("file", n_file)->required();
    indep->add_option("--a", n_a, "comma list of event names")->required();
    indep->add_option("--b", n_b, "comma list of event names")->required();
    indep->add_option("--cond", n_cond, "event names generating the conditioning algebra");
    indep->callback([&] {
        const ActionDocument doc = load_doc(n_file);
        const Subalgebra cond =
            generated_subalgebra(doc.action.space(), named_events(doc, n_cond));
        const IndependenceResult r =
            is_independent(named_events(doc, n_a), named_events(doc, n_b), cond);
        Json rep{{"independent", r.independent}};
        if (r.witness)
            rep["witness"] = Json{{"a", r.witness->a.atoms()},
                                  {"b", r.witness->b.atoms()},
                                  {"block", r.witness->c_block},
                                  {"product_of_conditionals", jrat(r.witness->lhs)},
                                  {"joint_conditional", jrat(r.witness->rhs)}};
        emit(rep, human);
        done(0);
    });

    // tp
    std::string t_file, t_a, t_b, t_cond;
    auto* tp = app.add_subcommand("tp", "equality of types of two event tuples over a subalgebra");
    tp->fallthrough();
    tp->add_option("file", t_file)->required();
    tp->add_option("--a", t_a, "comma list of event names")->required();
    tp->add_option("--b", t_b, "comma list of event names")->required();
    tp->add_option("--cond", t_cond, "event names generating the conditioning algebra");
    tp->callback([&] {
        const ActionDocument doc = load_doc(t_file);
        const Subalgebra cond =
            generated_subalgebra(doc.action.space(), named_events(doc, t_cond));
        const TypeResult r = tp_equal(named_events(doc, t_a), named_events(doc, t_b), cond);
        Json rep{{"equal", r.equal}};
        if (r.witness)
            rep["witness"] = Json{{"signs", r.witness->signs},
                                  {"block", r.witness->c_block},
                                  {"lhs", jrat(r.witness->lhs)},
                                  {"rhs", jrat(r.witness->rhs)}};
        emit(rep, human);
        done(0);
    });

    // join
    std::string j_a, j_b, j_out;
    auto* join = app.add_subcommand("join", "joining over the stabilizer-class factor");
    join->fallthrough();
    join->add_option("file_a", j_a)->required();
    join->add_option("file_b", j_b)->required();
    join->add_option("--out", j_out, "write the joined action document here");
    join->callback([&] {
        const ActionDocument da = load_doc(j_a), db = load_doc(j_b);
        const JoinResult jr = join_over_irs(da.action, db.action);
        const std::size_t arity = std::max(da.action.arity(), db.action.arity());
        Json pairs = Json::array();
        for (const auto& [x, y] : jr.pair_atoms) pairs.push_back(Json::array({x, y}));
        Json rep{{"atoms", jr.joined.space()->size()},
                 {"projection_1_ok", is_factor_map(jr.p1).ok},
                 {"projection_2_ok", is_factor_map(jr.p2).ok},
                 {"distribution_preserved",
                  irs_equal(empirical_irs(jr.joined, arity), empirical_irs(da.action, arity))},
                 {"pairs", pairs}};
        if (!j_out.empty()) {
            spill(j_out, serialize_action({jr.joined, {}}));
            rep["written"] = j_out;
        }
        emit(rep, human);
        done(0);
    });

    // amalg
    std::string m_a, m_b, m_common, m_words, m_out;
    auto* amalg = app.add_subcommand("amalg", "relative independent joining over a common subalgebra");
    amalg->fallthrough();
    amalg->add_option("file_a", m_a)->required();
    amalg->add_option("file_b", m_b)->required();
    amalg->add_option("--common", m_common, "event names present in both documents")->required();
    amalg->add_option("--words", m_words, "words whose supports must be preserved");
    amalg->add_option("--out", m_out, "write the amalgam document here");
    amalg->callback([&] {
        const ActionDocument da = load_doc(m_a), db = load_doc(m_b);
        const std::vector<Event> e1 = named_events(da, m_common);
        const std::vector<Event> e2 = named_events(db, m_common);
        const Subalgebra z1 = generated_subalgebra(da.action.space(), e1);
        const Subalgebra z2 = generated_subalgebra(db.action.space(), e2);
        const CommonSubalgebra z{z1, z2, block_correspondence(z1, e1, z2, e2)};
        const std::vector<Word> ws =
            m_words.empty() ? std::vector<Word>{} : word_list(m_words, da.action);
        const JoinResult jr = amalgamate(da.action, db.action, z, ws);
        Json rep{{"atoms", jr.joined.space()->size()},
                 {"common_blocks", z1.block_count()},
                 {"projection_1_ok", is_factor_map(jr.p1).ok},
                 {"projection_2_ok", is_factor_map(jr.p2).ok},
                 {"words", jwords(ws, da.action.gen_names())}};
        if (!m_out.empty()) {
            spill(m_out, serialize_action({jr.joined, {}}));
            rep["written"] = m_out;
        }
        emit(rep, human);
        done(0);
    });

    // conj
    std::string cj_a, cj_b, cj_words, cj_eps, cj_out;
    bool cj_exact = false;
    auto* conj = app.add_subcommand("conj", "approximate conjugacy witness via the joining");
    conj->fallthrough();
    conj->add_option("file_a", cj_a)->required();
    conj->add_option("file_b", cj_b)->required();
    conj->add_option("--words", cj_words,
                     "tested words, parsed against the first document's generator names "
                     "(default: the generators)");
    conj->add_flag("--exact", cj_exact, "demand error exactly zero (the default)");
    conj->add_option("--epsilon", cj_eps, "error budget p/q instead of exactness");
    conj->add_option("--out", cj_out, "write the witness JSON here");
    conj->callback([&] {
        if (cj_exact && !cj_eps.empty())
            throw ParseError("choose one of --exact and --epsilon");
        const ActionDocument da = load_doc(cj_a), db = load_doc(cj_b);
        const std::vector<Word> ws =
            cj_words.empty() ? generator_words(da.action) : word_list(cj_words, da.action);
        const std::optional<Rat> eps =
            cj_eps.empty() ? std::nullopt : std::optional<Rat>(rat_parse(cj_eps));
        const ConjugacyWitness w = approximate_conjugacy(da.action, db.action, ws, eps);
        Json rep{{"exact", !eps.has_value()},
                 {"refined_atoms", w.rho.size()},
                 {"delta", jrat(w.delta)},
                 {"mu_e", jrat(w.mu_e)},
                 {"certified_bound", jrat(w.certified_bound)},
                 {"error_mass", jrat(w.error.measure())},
                 {"words", jwords(ws, da.action.gen_names())}};
        if (!cj_out.empty()) {
            spill(cj_out, serialize_witness(w));
            rep["witness_file"] = cj_out;
        } else {
            rep["witness"] = Json::parse(serialize_witness(w));
        }
        emit(rep, human);
        done(0);
    });

    // conj-verify
    std::string v_a, v_b, v_w;
    auto* conj_verify = app.add_subcommand("conj-verify", "recheck a conjugacy witness from files");
    conj_verify->fallthrough();
    conj_verify->add_option("file_a", v_a)->required();
    conj_verify->add_option("file_b", v_b)->required();
    conj_verify->add_option("witness", v_w)->required();
    conj_verify->callback([&] {
        const ActionDocument da = load_doc(v_a), db = load_doc(v_b);
        const ConjugacyWitness w = parse_witness(slurp(v_w), da.action, db.action);
        const WitnessReport r = verify_witness(w, da.action, db.action, w.words, w.params);
        Json errs = Json::array();
        for (const Rat& x : r.word_errors) errs.push_back(jrat(x));
        emit(Json{{"ok", r.ok},
                  {"failures", r.failures},
                  {"measured_error", jrat(r.measured_error)},
                  {"certified_bound", jrat(w.certified_bound)},
                  {"word_errors", errs}},
             human);
        done(r.ok ? 0 : 1);
    });

    // check-axioms
    std::string x_file, x_irs_of, x_sets;
    std::size_t x_arity = 0;
    auto* check = app.add_subcommand("check-axioms", "automorphism and cylinder axioms of a model");
    check->fallthrough();
    check->add_option("file", x_file)->required();
    check->add_option("--irs-of", x_irs_of,
                      "take the target distribution from this document (default: the model's own)");
    check->add_option("--word-sets", x_sets,
                      "colon-separated word sets for the cylinder axioms, e.g. 'g1:g1,g2'");
    check->add_option("--arity", x_arity);
    check->callback([&] {
        const ActionDocument doc = load_doc(x_file);
        const ActionDocument theta_doc = x_irs_of.empty() ? doc : load_doc(x_irs_of);
        const std::size_t arity =
            std::max({doc.action.arity(), theta_doc.action.arity(), x_arity});
        std::vector<std::vector<Word>> f_list;
        if (x_sets.empty()) {
            for (const Word& w : generator_words(doc.action)) f_list.push_back({w});
        } else {
            for (const std::string& s : split(x_sets, ':'))
                f_list.push_back(word_list(s, doc.action));
        }
        const AxiomReport rep =
            check_theta_axioms(doc.action, empirical_irs(theta_doc.action, arity), f_list);
        Json entries = Json::array();
        for (const AxiomEntry& e : rep.entries)
            entries.push_back(Json{{"name", e.name},
                                   {"computed", jrat(e.computed)},
                                   {"target", jrat(e.target)},
                                   {"pass", e.pass},
                                   {"witness", e.witness}});
        emit(Json{{"all_pass", rep.all_pass}, {"entries", entries}}, human);
        done(rep.all_pass ? 0 : 1);
    });

    // demo-qe
    std::string q_a, q_b, q_t = "1/4", q_out_a, q_out_b;
    auto* demo = app.add_subcommand("demo-qe", "equal distributions, different cylinder values");
    demo->fallthrough();
    demo->add_option("file_a", q_a)->required();
    demo->add_option("file_b", q_b)->required();
    demo->add_option("--t", q_t, "mixture weight in (0, 1/2]");
    demo->add_option("--out-alpha", q_out_a, "write the first mixture document here");
    demo->add_option("--out-beta", q_out_b, "write the second mixture document here");
    demo->callback([&] {
        const ActionDocument da = load_doc(q_a), db = load_doc(q_b);
        const QeDemoReport r = qe_failure_demo(da.action, db.action, rat_parse(q_t));
        if (!q_out_a.empty())
            spill(q_out_a, serialize_action({r.alpha, {{"a", r.a_alpha}, {"b", r.b_alpha},
                                                       {"c", r.c_alpha}}}));
        if (!q_out_b.empty())
            spill(q_out_b, serialize_action({r.beta, {{"a", r.a_beta}, {"b", r.b_beta},
                                                      {"c", r.c_beta}}}));
        emit(Json{{"t", q_t},
                  {"f", jwords(r.f, r.alpha.gen_names())},
                  {"value_alpha", jrat(r.value_alpha)},
                  {"value_beta", jrat(r.value_beta)},
                  {"alpha_atoms", r.alpha.space()->size()},
                  {"beta_atoms", r.beta.space()->size()},
                  {"block_mass_a", jrat(r.a_alpha.measure())},
                  {"block_mass_b", jrat(r.b_alpha.measure())},
                  {"block_mass_c", jrat(r.c_alpha.measure())}},
             human);
        done(0);
    });

    // eval
    std::string e_file, e_formula;
    std::vector<std::string> e_assign, e_domain;
    std::size_t e_max_enum = 4096;
    auto* eval = app.add_subcommand("eval", "evaluate a formula on the action");
    eval->fallthrough();
    eval->add_option("file", e_file)->required();
    eval->add_option("--formula", e_formula, "s-expression formula text")->required();
    eval->add_option("--assign", e_assign, "free variable binding var=event_name (repeatable)");
    eval->add_option("--domain", e_domain,
                     "quantifier domain var=orbits or var=gen:ev+ev (repeatable)");
    eval->add_option("--max-enum", e_max_enum, "quantifier enumeration cap");
    eval->callback([&] {
        const ActionDocument doc = load_doc(e_file);
        const Formula f = parse_formula(e_formula);
        Assignment asg;
        for (const std::string& s : e_assign) {
            const std::size_t eq = s.find('=');
            if (eq == std::string::npos) throw ParseError("--assign expects var=event_name");
            asg.insert_or_assign(s.substr(0, eq), named_event(doc, s.substr(eq + 1)));
        }
        DomainMap domains;
        for (const std::string& s : e_domain) {
            const std::size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ParseError("--domain expects var=orbits or var=gen:ev+ev");
            const std::string var = s.substr(0, eq), kind = s.substr(eq + 1);
            if (kind == "orbits") {
                domains.insert_or_assign(var, doc.action.orbits());
            } else if (kind.rfind("gen:", 0) == 0) {
                std::vector<Event> evs;
                for (const std::string& name : split(kind.substr(4), '+'))
                    evs.push_back(named_event(doc, name));
                domains.insert_or_assign(var,
                                         generated_subalgebra(doc.action.space(), evs));
            } else {
                throw ParseError("--domain expects var=orbits or var=gen:ev+ev");
            }
        }
        emit(Json{{"formula", e_formula},
                  {"value", jrat(eval_formula(doc.action, f, asg, domains, e_max_enum))}},
             human);
        done(0);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ParseError& e) {
        emit(Json{{"error", Json{{"kind", "parse"}, {"message", e.what()}}}}, human);
        return 2;
    } catch (const DomainMismatchError& e) {
        emit(Json{{"error", Json{{"kind", "domain-mismatch"}, {"message", e.what()}}}}, human);
        return 1;
    } catch (const NoIsomorphismError& e) {
        emit(Json{{"error", Json{{"kind", "no-isomorphism"}, {"message", e.what()}}}}, human);
        return 1;
    } catch (const PreconditionError& e) {
        emit(Json{{"error", Json{{"kind", "precondition"}, {"message", e.what()}}}}, human);
        return 1;
    } catch (const ResourceError& e) {
        emit(Json{{"error", Json{{"kind", "resource"}, {"message", e.what()}}}}, human);
        return 1;
    } catch (const std::exception& e) {
        emit(Json{{"error", Json{{"kind", "internal"}, {"message", e.what()}}}}, human);
        return 1;
    }
    return rc;
}
