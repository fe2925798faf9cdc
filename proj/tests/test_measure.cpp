#include "doctest.h"

#include "finact/measure.hpp"

#include "testutil.hpp"

using namespace finact;
using testutil::Rng;

TEST_CASE("rational parse and format round-trip") {
    CHECK(rat_parse("3/6") == rat(1, 2));
    CHECK(rat_parse("-2/4") == rat(-1, 2));
    CHECK(rat_parse("7") == rat(7));
    CHECK(rat_str(rat(1, 3)) == "1/3");
    CHECK(rat_str(rat(4, 2)) == "2");
    CHECK(rat_str(rat_parse("0/5")) == "0");
    CHECK_THROWS_AS(rat_parse("1/0"), ParseError);
    CHECK_THROWS_AS(rat_parse("a/b"), ParseError);
    CHECK_THROWS_AS(rat_parse("1.5"), ParseError);
    CHECK_THROWS_AS(rat_parse(""), ParseError);
}

TEST_CASE("atom space validation") {
    CHECK_THROWS_AS(AtomSpace::create({}), PreconditionError);
    CHECK_THROWS_AS(AtomSpace::create({rat(1, 2), rat(1, 3)}), PreconditionError);
    CHECK_THROWS_AS(AtomSpace::create({rat(3, 2), rat(-1, 2)}), PreconditionError);
    CHECK_THROWS_AS(AtomSpace::create({rat(1), rat(0, 1)}), PreconditionError);
    auto sp = AtomSpace::create({rat(1, 2), rat(1, 4), rat(1, 4)});
    CHECK(sp->size() == 3);
    CHECK(sp->weight(0) == rat(1, 2));
}

TEST_CASE("event algebra and measures") {
    auto sp = AtomSpace::create({rat(1, 2), rat(1, 4), rat(1, 4)});
    Event a = Event::of_atoms(sp, {0, 1});
    Event b = Event::of_atoms(sp, {1, 2});
    CHECK((a & b).measure() == rat(1, 4));
    CHECK((a | b).measure() == rat(1));
    CHECK((a ^ b).measure() == rat(3, 4));
    CHECK((a - b).measure() == rat(1, 2));
    CHECK((~a).measure() == rat(1, 4));
    CHECK(Event::full(sp).measure() == rat(1));
    CHECK(Event::empty(sp).is_empty());
    CHECK((a & b).subset_of(a));

    auto other = AtomSpace::uniform(4);
    Event c = Event::of_atoms(other, {0});
    CHECK_THROWS_AS((void)(a & c), DomainMismatchError);
    CHECK_THROWS_AS(Event::of_atoms(sp, {7}), PreconditionError);

    // Structurally equal spaces are the same space.
    auto sp2 = AtomSpace::create({rat(1, 2), rat(1, 4), rat(1, 4)});
    Event d = Event::of_atoms(sp2, {0});
    CHECK((a & d).measure() == rat(1, 2));
}

TEST_CASE("generated subalgebra is the coarsest refinement") {
    auto sp = AtomSpace::uniform(6);
    Event a = Event::of_atoms(sp, {0, 1, 2});
    Event b = Event::of_atoms(sp, {2, 3});
    Subalgebra alg = generated_subalgebra(sp, {a, b});
    // Signatures: {0,1} | {2} | {3} | {4,5}.
    CHECK(alg.block_count() == 4);
    CHECK(alg.contains(a));
    CHECK(alg.contains(b));
    CHECK(!alg.contains(Event::of_atoms(sp, {0})));
    // Coarsest: every event of the algebra is a union of signature cells, so
    // any partition all of whose blocks split a signature cell is finer.
    CHECK(alg.block_of(0) == alg.block_of(1));
    CHECK(alg.block_of(4) == alg.block_of(5));

    Subalgebra none = generated_subalgebra(sp, {});
    CHECK(none.block_count() == 1);

    Subalgebra joined = join_subalgebra(alg, generated_subalgebra(sp, {Event::of_atoms(sp, {1, 2})}));
    CHECK(joined.block_count() == 6 - 1); // splits {0,1} and {2},{3} stay; {4,5} stays
}

TEST_CASE("conditional expectation on blocks") {
    // Pinned example: weights (1/2, 1/4, 1/4), a = {1}, blocks {0} and {1,2}.
    auto sp = AtomSpace::create({rat(1, 2), rat(1, 4), rat(1, 4)});
    Event a = Event::of_atoms(sp, {1});
    Subalgebra alg = generated_subalgebra(sp, {Event::of_atoms(sp, {0})});
    ConditionalExpectation ce = conditional_expectation(a, alg);
    REQUIRE(ce.value.size() == 2);
    CHECK(ce.value[0] == rat(0));
    CHECK(ce.value[1] == rat(1, 2));
    // Tower property down to the trivial algebra.
    CHECK(ce.integral() == a.measure());

    ConditionalExpectation fine = conditional_expectation(a, Subalgebra::discrete(sp));
    CHECK(fine.value == std::vector<Rat>{rat(0), rat(1), rat(0)});
}

TEST_CASE("independence: cell-level check agrees with full quantification") {
    // Two-block conditioning, conditionally independent by construction:
    // inside block 1 both marginals are 1/2, inside block 2 both are 1/3.
    auto sp = AtomSpace::create({rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 18),
                                 rat(1, 9), rat(1, 9), rat(2, 9)});
    Event A = Event::of_atoms(sp, {0, 1, 4, 5});
    Event B = Event::of_atoms(sp, {0, 2, 4, 6});
    Subalgebra cond = generated_subalgebra(sp, {Event::of_atoms(sp, {0, 1, 2, 3})});

    auto res = is_independent({A}, {B}, cond);
    CHECK(res.independent);
    CHECK(testutil::independent_oracle({A}, {B}, cond));

    // Unconditionally the same pair is dependent.
    auto flat = is_independent({A}, {B}, Subalgebra::trivial(sp));
    CHECK(!flat.independent);
    REQUIRE(flat.witness.has_value());
    CHECK(flat.witness->lhs != flat.witness->rhs);
    CHECK(!testutil::independent_oracle({A}, {B}, Subalgebra::trivial(sp)));
}

TEST_CASE("independence matches the full-quantification oracle on random spaces") {
    Rng rng(20240811);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 8);
        auto sp = AtomSpace::uniform(nd(rng));
        std::vector<Event> fa = {testutil::random_event(sp, rng)};
        std::vector<Event> fb = {testutil::random_event(sp, rng)};
        Subalgebra cond = generated_subalgebra(sp, {testutil::random_event(sp, rng)});
        CHECK(is_independent(fa, fb, cond).independent ==
              testutil::independent_oracle(fa, fb, cond));
    }
}

TEST_CASE("type equality over a subalgebra") {
    // Pinned example: uniform 6 atoms, conditioning blocks {0,1,2} and {3,4,5}.
    auto sp = AtomSpace::uniform(6);
    Subalgebra cond = generated_subalgebra(sp, {Event::of_atoms(sp, {0, 1, 2})});
    std::vector<Event> ta = {Event::of_atoms(sp, {0, 3})};
    std::vector<Event> tb = {Event::of_atoms(sp, {1, 4})};
    CHECK(tp_equal(ta, tb, cond).equal);
    CHECK(testutil::tp_automorphism_oracle(ta, tb, cond));

    std::vector<Event> tc = {Event::of_atoms(sp, {0, 1})};
    std::vector<Event> td = {Event::of_atoms(sp, {2, 3})};
    auto neq = tp_equal(tc, td, cond);
    CHECK(!neq.equal);
    REQUIRE(neq.witness.has_value());
    CHECK(neq.witness->lhs != neq.witness->rhs);
    CHECK(!testutil::tp_automorphism_oracle(tc, td, cond));
}

TEST_CASE("type equality matches the automorphism oracle on block-homogeneous spaces") {
    // The conditional-measure criterion coincides with automorphism existence
    // when atom weights are constant within each conditioning block.
    Rng rng(20240812);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 6);
        const std::size_t n = nd(rng);
        auto sp = AtomSpace::uniform(n);
        std::uniform_int_distribution<std::size_t> len(1, 2);
        const std::size_t tuple_len = len(rng);
        std::vector<Event> ta, tb;
        for (std::size_t i = 0; i < tuple_len; ++i) {
            ta.push_back(testutil::random_event(sp, rng));
            tb.push_back(testutil::random_event(sp, rng));
        }
        Subalgebra cond = Subalgebra::trivial(sp);
        CHECK(tp_equal(ta, tb, cond).equal == testutil::tp_automorphism_oracle(ta, tb, cond));
    }
    // Non-uniform weights, conditioning separates the weight classes, so each
    // block stays homogeneous.
    auto sp = AtomSpace::create({rat(1, 4), rat(1, 4), rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 8)});
    Subalgebra cond = generated_subalgebra(sp, {Event::of_atoms(sp, {0, 1})});
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Event> ta = {testutil::random_event(sp, rng)};
        std::vector<Event> tb = {testutil::random_event(sp, rng)};
        CHECK(tp_equal(ta, tb, cond).equal == testutil::tp_automorphism_oracle(ta, tb, cond));
    }
}

TEST_CASE("refinement splits atoms and transports events") {
    auto sp = AtomSpace::create({rat(1, 2), rat(1, 2)});
    Refinement r = refine(sp, {{rat(1, 4), rat(1, 4)}, {rat(1, 2)}});
    CHECK(r.refined()->size() == 3);
    CHECK(r.refined()->weight(0) == rat(1, 4));
    CHECK(r.source_atom(2) == 1);
    Event lifted = r.lift(Event::of_atoms(sp, {0}));
    CHECK(lifted.measure() == rat(1, 2));
    CHECK(lifted.atoms() == std::vector<std::uint32_t>{0, 1});

    CHECK_THROWS_AS(refine(sp, {{rat(1, 4)}, {rat(1, 2)}}), PreconditionError);
    CHECK_THROWS_AS(refine(sp, {{rat(1, 2), rat(0)}, {rat(1, 2)}}), PreconditionError);
    CHECK_THROWS_AS(refine(sp, {{rat(1, 2)}}), PreconditionError);

    Refinement id = Refinement::identity(sp);
    CHECK(id.refined()->size() == 2);
    CHECK(id.lift(Event::of_atoms(sp, {1})) == Event::of_atoms(sp, {1}));
}

TEST_CASE("subalgebra event enumeration budget") {
    auto sp = AtomSpace::uniform(16);
    Subalgebra disc = Subalgebra::discrete(sp);
    CHECK_THROWS_AS(disc.events(1 << 12), ResourceError);
    CHECK(Subalgebra::trivial(sp).events(4).size() == 2);
}
