#include "finact/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <sstream>
#include <utility>

#include "finact/errors.hpp"

namespace finact {

namespace {

using Json = nlohmann::ordered_json;

struct Line {
    std::size_t no; // 1-based in the original text
    std::vector<std::string> toks;
};

std::vector<Line> significant_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    for (std::size_t no = 1; std::getline(in, raw); ++no) {
        std::istringstream ls(raw);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(std::move(t));
        if (toks.empty() || toks[0][0] == '#') continue;
        out.push_back({no, std::move(toks)});
    }
    return out;
}

[[noreturn]] void fail(std::size_t no, const std::string& msg) {
    throw ParseError("line " + std::to_string(no) + ": " + msg);
}

std::uint32_t parse_u32(const Line& l, const std::string& tok, const char* what) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(tok, &used);
    } catch (const std::exception&) {
        fail(l.no, std::string(what) + " '" + tok + "' is not a number");
    }
    if (used != tok.size() || v > 0xffffffffUL)
        fail(l.no, std::string(what) + " '" + tok + "' is not a number");
    return static_cast<std::uint32_t>(v);
}

Rat parse_weight(const Line& l, const std::string& tok) {
    try {
        return rat_parse(tok);
    } catch (const std::exception& e) {
        fail(l.no, e.what());
    }
}

bool usable_name(const std::string& s) {
    // Reserved: word syntax ('.', apostrophe, "e"), comment marker, and the
    // separators the command line uses for name lists.
    if (s.empty() || s == "e" || s[0] == '#') return false;
    return s.find_first_of(".',;:+=") == std::string::npos;
}

} // namespace

ActionDocument parse_action(const std::string& text) {
    const std::vector<Line> lines = significant_lines(text);
    std::size_t i = 0;
    if (lines.empty() || lines[0].toks != std::vector<std::string>{"finact-action", "v1"})
        fail(lines.empty() ? 1 : lines[0].no, "expected header 'finact-action v1'");
    ++i;

    if (i >= lines.size() || lines[i].toks.size() != 2 || lines[i].toks[0] != "atoms")
        fail(i < lines.size() ? lines[i].no : lines.back().no + 1, "expected 'atoms <n>'");
    const Line& atoms_line = lines[i];
    const std::uint32_t n = parse_u32(atoms_line, atoms_line.toks[1], "atom count");
    if (n == 0) fail(atoms_line.no, "atom count must be positive");
    ++i;

    std::vector<Rat> weights(n);
    Rat sum(0);
    for (std::uint32_t a = 0; a < n; ++a, ++i) {
        if (i >= lines.size() || lines[i].toks.size() != 2)
            fail(i < lines.size() ? lines[i].no : lines.back().no + 1,
                 "expected '<id> <weight>' for atom " + std::to_string(a));
        if (parse_u32(lines[i], lines[i].toks[0], "atom id") != a)
            fail(lines[i].no, "expected atom " + std::to_string(a) + ", got " + lines[i].toks[0]);
        weights[a] = parse_weight(lines[i], lines[i].toks[1]);
        if (weights[a] <= 0)
            fail(lines[i].no, "atom " + std::to_string(a) + " has non-positive weight " +
                                  lines[i].toks[1]);
        sum += weights[a];
    }
    if (sum != 1)
        fail(atoms_line.no, "atom weights sum to " + rat_str(sum) + ", expected 1");
    const SpacePtr space = AtomSpace::create(std::move(weights));

    std::vector<std::string> gen_names;
    std::vector<Perm> gens;
    std::vector<std::pair<std::string, Event>> events;
    for (; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.toks[0] == "gen") {
            if (l.toks.size() < 2) fail(l.no, "expected 'gen <name> <images>'");
            const std::string& name = l.toks[1];
            if (!usable_name(name)) fail(l.no, "generator name '" + name + "' is reserved");
            if (std::find(gen_names.begin(), gen_names.end(), name) != gen_names.end())
                fail(l.no, "duplicate generator name '" + name + "'");
            if (l.toks.size() != 2 + n)
                fail(l.no, "generator '" + name + "' lists " + std::to_string(l.toks.size() - 2) +
                               " images for " + std::to_string(n) + " atoms");
            Perm p(n);
            for (std::uint32_t x = 0; x < n; ++x) p[x] = parse_u32(l, l.toks[2 + x], "image");
            if (!perm_valid(p, n))
                fail(l.no, "generator '" + name + "' image table is not a permutation");
            for (std::uint32_t x = 0; x < n; ++x)
                if (space->weight(p[x]) != space->weight(x))
                    fail(l.no, "generator '" + name + "' maps atom " + std::to_string(x) + " (" +
                                   rat_str(space->weight(x)) + ") onto atom " +
                                   std::to_string(p[x]) + " (" + rat_str(space->weight(p[x])) +
                                   ")");
            gen_names.push_back(name);
            gens.push_back(std::move(p));
        } else if (l.toks[0] == "event") {
            if (l.toks.size() < 2) fail(l.no, "expected 'event <name> <ids>'");
            const std::string& name = l.toks[1];
            if (!usable_name(name)) fail(l.no, "event name '" + name + "' is reserved");
            for (const auto& [other, e] : events)
                if (other == name) fail(l.no, "duplicate event name '" + name + "'");
            Mask m(n);
            for (std::size_t t = 2; t < l.toks.size(); ++t) {
                const std::uint32_t a = parse_u32(l, l.toks[t], "atom id");
                if (a >= n)
                    fail(l.no, "event '" + name + "' lists atom " + std::to_string(a) +
                                   " outside 0.." + std::to_string(n - 1));
                m.set(a);
            }
            events.emplace_back(name, Event(space, std::move(m)));
        } else {
            fail(l.no, "unknown directive '" + l.toks[0] + "'");
        }
    }
    return {Action(space, std::move(gen_names), std::move(gens)), std::move(events)};
}

std::string serialize_action(const ActionDocument& doc) {
    const Action& a = doc.action;
    const std::size_t n = a.space()->size();
    std::string out = "finact-action v1\natoms " + std::to_string(n) + "\n";
    for (std::size_t x = 0; x < n; ++x)
        out += std::to_string(x) + " " + rat_str(a.space()->weight(x)) + "\n";
    for (std::size_t i = 0; i < a.arity(); ++i) {
        out += "gen " + a.gen_names()[i];
        for (const std::uint32_t y : a.gen(i)) out += " " + std::to_string(y);
        out += "\n";
    }
    for (const auto& [name, e] : doc.events) {
        out += "event " + name;
        for (const std::uint32_t x : e.atoms()) out += " " + std::to_string(x);
        out += "\n";
    }
    return out;
}

namespace {

Json perm_table(const std::vector<Perm>& gens) {
    Json out = Json::array();
    for (const Perm& p : gens) out.push_back(p);
    return out;
}

Json atom_list(const Event& e) { return Json(e.atoms()); }

std::vector<Perm> read_perms(const Json& j) {
    std::vector<Perm> out;
    for (const auto& row : j) out.push_back(row.get<Perm>());
    return out;
}

} // namespace

std::string serialize_witness(const ConjugacyWitness& w) {
    Json j;
    j["format"] = "finact-witness v1";
    j["delta"] = rat_str(w.delta);
    j["certified_bound"] = rat_str(w.certified_bound);
    j["mu_e"] = rat_str(w.mu_e);
    j["alpha_pieces"] = w.alpha_refinement.map();
    j["beta_pieces"] = w.beta_refinement.map();
    j["alpha_gen_names"] = w.refined_alpha.gen_names();
    j["alpha_gens"] = perm_table([&] {
        std::vector<Perm> g;
        for (std::size_t i = 0; i < w.refined_alpha.arity(); ++i) g.push_back(w.refined_alpha.gen(i));
        return g;
    }());
    j["beta_gen_names"] = w.refined_beta.gen_names();
    j["beta_gens"] = perm_table([&] {
        std::vector<Perm> g;
        for (std::size_t i = 0; i < w.refined_beta.arity(); ++i) g.push_back(w.refined_beta.gen(i));
        return g;
    }());
    j["rho"] = w.rho;
    j["rho_inv"] = w.rho_inv;
    j["error"] = atom_list(w.error);
    Json z = Json::array();
    for (const auto& [x, y] : w.z.pairs) z.push_back(Json::array({x, y}));
    j["z"] = z;
    Json words = Json::array();
    for (const Word& u : w.words) words.push_back(u.letters());
    j["words"] = words;
    Json params = Json::array();
    for (const auto& [a, b] : w.params)
        params.push_back(Json{{"a", atom_list(a)}, {"b", atom_list(b)}});
    j["params"] = params;
    return j.dump(2) + "\n";
}

ConjugacyWitness parse_witness(const std::string& text, const Action& alpha, const Action& beta) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("witness: ") + e.what());
    }
    try {
        if (j.contains("witness")) j = j["witness"]; // accept a wrapping report
        if (j.at("format") != "finact-witness v1")
            throw ParseError("witness: expected format 'finact-witness v1'");

        const Rat delta = rat_parse(j.at("delta").get<std::string>());
        const auto pieces_a = j.at("alpha_pieces").get<std::vector<std::uint32_t>>();
        const auto pieces_b = j.at("beta_pieces").get<std::vector<std::uint32_t>>();
        const SpacePtr ra = AtomSpace::create(std::vector<Rat>(pieces_a.size(), delta));
        const SpacePtr rb = AtomSpace::create(std::vector<Rat>(pieces_b.size(), delta));
        Refinement refa(alpha.space(), ra, pieces_a);
        Refinement refb(beta.space(), rb, pieces_b);

        Action fine_a(ra, j.at("alpha_gen_names").get<std::vector<std::string>>(),
                      read_perms(j.at("alpha_gens")));
        Action fine_b(rb, j.at("beta_gen_names").get<std::vector<std::string>>(),
                      read_perms(j.at("beta_gens")));

        Event error = Event::of_atoms(ra, j.at("error").get<std::vector<std::uint32_t>>());

        EdgeSet z;
        for (const auto& e : j.at("z")) {
            const auto x = e.at(0).get<std::uint32_t>();
            const auto y = e.at(1).get<std::uint32_t>();
            z.pairs.emplace_back(x, y);
            z.pairs.emplace_back(y, x);
        }
        std::sort(z.pairs.begin(), z.pairs.end());
        z.pairs.erase(std::unique(z.pairs.begin(), z.pairs.end()), z.pairs.end());

        std::vector<Word> words;
        for (const auto& l : j.at("words")) words.push_back(Word(l.get<std::vector<std::int32_t>>()));

        std::vector<std::pair<Event, Event>> params;
        for (const auto& p : j.at("params"))
            params.emplace_back(
                Event::of_atoms(alpha.space(), p.at("a").get<std::vector<std::uint32_t>>()),
                Event::of_atoms(beta.space(), p.at("b").get<std::vector<std::uint32_t>>()));

        return ConjugacyWitness{std::move(refa),
                                std::move(refb),
                                std::move(fine_a),
                                std::move(fine_b),
                                j.at("rho").get<std::vector<std::uint32_t>>(),
                                j.at("rho_inv").get<std::vector<std::uint32_t>>(),
                                std::move(error),
                                rat_parse(j.at("certified_bound").get<std::string>()),
                                delta,
                                rat_parse(j.at("mu_e").get<std::string>()),
                                std::move(z),
                                std::move(words),
                                std::move(params)};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        // Field errors and structural mismatches against the actions.
        throw ParseError(std::string("witness: ") + e.what());
    }
}

ActionDocument gen_cyclic(std::uint32_t n) {
    if (n == 0) throw PreconditionError("cyclic action needs at least one atom");
    Perm p(n);
    for (std::uint32_t x = 0; x < n; ++x) p[x] = (x + 1) % n;
    return {Action::with_default_names(AtomSpace::uniform(n), {std::move(p)}), {}};
}

ActionDocument gen_orbits(const std::vector<std::uint32_t>& sizes) {
    if (sizes.empty()) throw PreconditionError("orbit list is empty");
    std::uint64_t total = 0;
    for (const std::uint32_t s : sizes) {
        if (s == 0) throw PreconditionError("orbit sizes must be positive");
        total += s;
    }
    if (total > 1000000) throw ResourceError("orbit action has " + std::to_string(total) +
                                             " atoms; the cap is 1000000");
    Perm p(total);
    std::uint32_t base = 0;
    for (const std::uint32_t s : sizes) {
        for (std::uint32_t x = 0; x < s; ++x) p[base + x] = base + (x + 1) % s;
        base += s;
    }
    return {Action::with_default_names(AtomSpace::uniform(total), {std::move(p)}), {}};
}

ActionDocument gen_random(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
    if (n == 0) throw PreconditionError("random action needs at least one atom");
    std::mt19937_64 rng(seed);
    std::vector<Perm> gens(k);
    for (Perm& p : gens) {
        p.resize(n);
        for (std::uint32_t x = 0; x < n; ++x) p[x] = x;
        for (std::uint32_t i = n - 1; i > 0; --i)
            std::swap(p[i], p[rng() % (i + 1)]);
    }
    return {Action::with_default_names(AtomSpace::uniform(n), std::move(gens)), {}};
}

ActionDocument gen_coset(const std::vector<std::uint32_t>& moduli) {
    if (moduli.empty()) throw PreconditionError("modulus list is empty");
    std::uint64_t total = 1;
    for (const std::uint32_t m : moduli) {
        if (m == 0) throw PreconditionError("moduli must be positive");
        total *= m;
        if (total > 1000000)
            throw ResourceError("coset action exceeds 1000000 atoms");
    }
    const auto n = static_cast<std::uint32_t>(total);
    std::vector<Perm> gens(moduli.size());
    std::uint64_t stride = 1;
    for (std::size_t i = moduli.size(); i-- > 0;) {
        const std::uint32_t m = moduli[i];
        Perm& p = gens[i];
        p.resize(n);
        for (std::uint32_t x = 0; x < n; ++x) {
            const std::uint32_t digit = static_cast<std::uint32_t>((x / stride) % m);
            p[x] = digit + 1 < m ? x + static_cast<std::uint32_t>(stride)
                                 : x - static_cast<std::uint32_t>(stride * (m - 1));
        }
        stride *= m;
    }
    return {Action::with_default_names(AtomSpace::uniform(n), std::move(gens)), {}};
}

} // namespace finact
