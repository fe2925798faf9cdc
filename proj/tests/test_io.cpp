#include "doctest.h"

#include <json.hpp>

#include <string>
#include <vector>

#include "finact/conjugacy.hpp"
#include "finact/errors.hpp"
#include "finact/io.hpp"
#include "testutil.hpp"

namespace {

using namespace finact;

bool mentions(const std::exception& e, const char* needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

std::string parse_error_of(const std::string& text) {
    try {
        parse_action(text);
        return "";
    } catch (const ParseError& e) {
        return e.what();
    }
}

} // namespace

TEST_CASE("document round trip is byte identical") {
    const std::string text = "finact-action v1\n"
                             "atoms 4\n"
                             "0 1/4\n"
                             "1 1/4\n"
                             "2 1/4\n"
                             "3 1/4\n"
                             "gen g1 1 2 3 0\n"
                             "event top 0 1 2 3\n"
                             "event low 2\n";
    const ActionDocument doc = parse_action(text);
    CHECK(serialize_action(doc) == text);
    CHECK(doc.action.arity() == 1);
    CHECK(doc.action.gen_names() == std::vector<std::string>{"g1"});
    CHECK(doc.events.size() == 2);
    CHECK(doc.events[0].first == "top");
    CHECK(doc.events[1].second == Event::singleton(doc.action.space(), 2));

    // Non-canonical input (comments, blank lines, unsorted event ids) parses
    // to the same document and serializes canonically.
    const std::string messy = "# a comment\n"
                              "finact-action v1\n"
                              "atoms 4\n\n"
                              "0 1/4\n"
                              "1 1/4\n"
                              "2 1/4\n"
                              "3 1/4\n"
                              "gen g1 1 2 3 0\n"
                              "event top 3 0 2 1\n"
                              "event low 2 2\n";
    CHECK(serialize_action(parse_action(messy)) == text);
}

TEST_CASE("document rejections carry their line") {
    CHECK(mentions(ParseError(parse_error_of("")), "line 1"));
    CHECK(parse_error_of("finact-action v2\natoms 1\n0 1\n") ==
          "line 1: expected header 'finact-action v1'");
    CHECK(parse_error_of("finact-action v1\natoms 2\n0 1/2\n1 5/8\n") ==
          "line 2: atom weights sum to 9/8, expected 1");
    CHECK(parse_error_of("finact-action v1\natoms 2\n0 1/2\n2 1/2\n") ==
          "line 4: expected atom 1, got 2");
    CHECK(parse_error_of("finact-action v1\natoms 2\n0 1/2\n1 1/2\ngen g1 0 0\n") ==
          "line 5: generator 'g1' image table is not a permutation");
    CHECK(parse_error_of("finact-action v1\natoms 2\n0 1/2\n1 1/2\ngen g1 0\n") ==
          "line 5: generator 'g1' lists 1 images for 2 atoms");
    CHECK(parse_error_of("finact-action v1\natoms 2\n0 2/3\n1 1/3\ngen g1 1 0\n") ==
          "line 5: generator 'g1' maps atom 0 (2/3) onto atom 1 (1/3)");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 1\nfrob x\n") ==
          "line 4: unknown directive 'frob'");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 1\nevent top 1\n") ==
          "line 4: event 'top' lists atom 1 outside 0..0");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 1\nevent a 0\nevent a 0\n") ==
          "line 5: duplicate event name 'a'");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 1\ngen e 0\n") ==
          "line 4: generator name 'e' is reserved");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 1\ngen a.b 0\n") ==
          "line 4: generator name 'a.b' is reserved");
    CHECK(parse_error_of("finact-action v1\natoms 1\n0 0\n") ==
          "line 3: atom 0 has non-positive weight 0");
    CHECK(mentions(ParseError(parse_error_of("finact-action v1\natoms 2\n0 x\n1 1/2\n")),
                   "line 3"));
}

TEST_CASE("generated instances") {
    const ActionDocument c4 = gen_cyclic(4);
    CHECK(serialize_action(c4) == "finact-action v1\n"
                                  "atoms 4\n"
                                  "0 1/4\n"
                                  "1 1/4\n"
                                  "2 1/4\n"
                                  "3 1/4\n"
                                  "gen g1 1 2 3 0\n");

    const ActionDocument orb = gen_orbits({2, 3});
    CHECK(orb.action.space()->size() == 5);
    CHECK(orb.action.gen(0) == Perm{1, 0, 3, 4, 2});
    CHECK(orb.action.orbits().block_count() == 2);

    const ActionDocument cos = gen_coset({2, 3});
    CHECK(cos.action.arity() == 2);
    CHECK(cos.action.gen(0) == Perm{3, 4, 5, 0, 1, 2});
    CHECK(cos.action.gen(1) == Perm{1, 2, 0, 4, 5, 3});
    // The two coordinate steps commute.
    CHECK(perm_compose(cos.action.gen(0), cos.action.gen(1)) ==
          perm_compose(cos.action.gen(1), cos.action.gen(0)));
    CHECK(cos.action.orbits().block_count() == 1);

    const ActionDocument r1 = gen_random(6, 2, 7), r2 = gen_random(6, 2, 7);
    CHECK(serialize_action(r1) == serialize_action(r2));
    CHECK(r1.action.arity() == 2);
    CHECK(perm_valid(r1.action.gen(0), 6));
    CHECK(serialize_action(gen_random(6, 2, 8)) != serialize_action(r1));
    CHECK(gen_random(5, 0, 1).action.arity() == 0);

    CHECK_THROWS_AS(gen_cyclic(0), PreconditionError);
    CHECK_THROWS_AS(gen_orbits({}), PreconditionError);
    CHECK_THROWS_AS(gen_orbits({3, 0}), PreconditionError);
    CHECK_THROWS_AS(gen_coset({1000, 1000, 1000}), ResourceError);
}

TEST_CASE("witness serialization replays through the verifier") {
    testutil::Rng rng(2468);
    const ActionDocument da = gen_random(8, 2, 31);
    const Action alpha = da.action;
    const Action beta = testutil::relabel_action(alpha, testutil::random_perm(8, rng));
    const std::vector<Word> words{Word::gen(1), Word::gen(2), Word::gen(1) * Word::gen(2)};

    const ConjugacyWitness w = approximate_conjugacy(alpha, beta, words, std::nullopt);
    const std::string text = serialize_witness(w);
    const ConjugacyWitness back = parse_witness(text, alpha, beta);

    CHECK(back.rho == w.rho);
    CHECK(back.rho_inv == w.rho_inv);
    CHECK(back.delta == w.delta);
    CHECK(back.mu_e == w.mu_e);
    CHECK(back.certified_bound == w.certified_bound);
    CHECK(back.z.pairs == w.z.pairs);
    CHECK(back.words == w.words);
    CHECK(back.error.atoms() == w.error.atoms());
    CHECK(back.params.size() == w.params.size());

    const WitnessReport rep = verify_witness(back, alpha, beta, back.words, back.params);
    CHECK(rep.ok);
    CHECK(rep.failures.empty());

    // Serialization is stable: a reparse serializes to the same bytes.
    CHECK(serialize_witness(back) == text);
}

TEST_CASE("witness parsing rejects malformed and foreign input") {
    const Action c4 = gen_cyclic(4).action;
    const Action c4b = gen_cyclic(4).action;
    const ConjugacyWitness w =
        approximate_conjugacy(c4, c4b, {Word::gen(1)}, std::nullopt);
    const std::string text = serialize_witness(w);

    CHECK_THROWS_AS(parse_witness("not json", c4, c4b), ParseError);
    CHECK_THROWS_AS(parse_witness("{}", c4, c4b), ParseError);

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
    j["format"] = "finact-witness v0";
    CHECK_THROWS_AS(parse_witness(j.dump(), c4, c4b), ParseError);

    // Piece maps that do not tile the claimed action are structural errors.
    const Action c2 = gen_cyclic(2).action;
    CHECK_THROWS_AS(parse_witness(text, c2, c2), ParseError);

    // A corrupted rho parses fine and is caught by the verifier instead.
    nlohmann::ordered_json k = nlohmann::ordered_json::parse(text);
    std::swap(k["rho"][0], k["rho"][1]);
    const ConjugacyWitness bad = parse_witness(k.dump(), c4, c4b);
    const WitnessReport rep = verify_witness(bad, c4, c4b, bad.words, bad.params);
    CHECK_FALSE(rep.ok);
}
