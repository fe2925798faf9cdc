#include "doctest.h"

#include "finact/irs.hpp"

#include "testutil.hpp"

using namespace finact;
using testutil::Rng;

namespace {

Action c4_c2() {
    return Action::with_default_names(AtomSpace::uniform(6), {Perm{1, 2, 3, 0, 5, 4}});
}

Action random_action(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<Perm> gens;
    for (std::size_t i = 0; i < k; ++i) gens.push_back(testutil::random_perm(n, rng));
    return Action::with_default_names(AtomSpace::uniform(n), gens);
}

} // namespace

TEST_CASE("empirical irs: pinned distributions") {
    Action cyc = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 2, 3, 0}});
    auto i4 = empirical_irs(cyc);
    REQUIRE(i4.classes.size() == 1);
    CHECK(i4.classes[0].second == rat(1));

    auto mix = empirical_irs(c4_c2());
    REQUIRE(mix.classes.size() == 2);
    CHECK(mix.encode() == "2:1,0=1/3;4:1,3,0,2=2/3");
    CHECK(mix.mass_of(i4.classes[0].first) == rat(2, 3));

    // Identity action: a single trivial class.
    Action ident = Action::with_default_names(AtomSpace::uniform(3), {Perm{0, 1, 2}});
    auto ii = empirical_irs(ident);
    REQUIRE(ii.classes.size() == 1);
    CHECK(ii.classes[0].first.size == 1);
}

TEST_CASE("empirical irs: scale invariance and arity padding") {
    Action one_c2 = Action::with_default_names(AtomSpace::uniform(2), {Perm{1, 0}});
    Action two_c2 = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 0, 3, 2}});
    CHECK(irs_equal(empirical_irs(one_c2), empirical_irs(two_c2)));

    // A second generator acting as the identity does not change the IRS.
    Action padded = Action::with_default_names(AtomSpace::uniform(2), {Perm{1, 0}, Perm{0, 1}});
    CHECK(irs_equal(empirical_irs(one_c2), empirical_irs(padded)));
    CHECK(irs_equal(empirical_irs(padded), empirical_irs(one_c2)));

    Action cyc = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 2, 3, 0}});
    auto diff = irs_first_difference(empirical_irs(cyc), empirical_irs(one_c2));
    REQUIRE(diff.has_value());
    CHECK((diff->cls.size == 2 || diff->cls.size == 4));
    CHECK(diff->mass_a != diff->mass_b);
}

TEST_CASE("cylinders: pinned values and query validation") {
    Action cyc = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 2, 3, 0}});
    CHECK(irs_cylinder(cyc, {{Word::gen(1)}, {}}) == rat(0));

    Action mix = c4_c2();
    // Fix(g^2) = the C2 orbit; Supp(g) = everything.
    CHECK(irs_cylinder(mix, {{Word::power(1, 2)}, {Word::gen(1)}}) == rat(1, 3));
    CHECK(irs_cylinder_incl_excl(mix, {{Word::power(1, 2)}, {Word::gen(1)}}) == rat(1, 3));
    CHECK(irs_cylinder_mass(empirical_irs(mix), {{Word::power(1, 2)}, {Word::gen(1)}}) ==
          rat(1, 3));

    CHECK(supp_cylinder_mass(empirical_irs(mix), {Word::gen(1)}) == rat(1));
    CHECK(supp_cylinder_mass(empirical_irs(mix), {Word::power(1, 2)}) == rat(2, 3));

    CHECK_THROWS_AS(irs_cylinder(mix, {{Word::gen(1)}, {Word::gen(1)}}), PreconditionError);
    std::vector<Word> many;
    for (std::uint32_t i = 1; i <= 21; ++i) many.push_back(Word::gen(i));
    CHECK_THROWS_AS(irs_cylinder_incl_excl(mix, {{}, many}), ResourceError);
}

TEST_CASE("cylinders: three routes agree on random queries") {
    Rng rng(911);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 9), kd(1, 2);
        Action a = random_action(nd(rng), kd(rng), rng);
        auto irs = empirical_irs(a);
        std::uniform_int_distribution<int> letter(-2, 2), len(1, 3), cnt(0, 2);
        auto random_word = [&] {
            std::vector<std::int32_t> ls;
            const int L = len(rng);
            for (int j = 0; j < L; ++j)
                if (int l = letter(rng); l != 0) ls.push_back(l);
            return Word(ls);
        };
        CylinderQuery q;
        for (int i = cnt(rng); i > 0; --i) q.fix_words.push_back(random_word());
        for (int i = cnt(rng); i > 0; --i) {
            Word w = random_word();
            bool clash = false;
            for (const Word& f : q.fix_words) clash |= (f == w);
            if (!clash) q.supp_words.push_back(w);
        }
        const Rat direct = irs_cylinder(a, q);
        CHECK(direct == irs_cylinder_incl_excl(a, q));
        CHECK(direct == irs_cylinder_mass(irs, q));

        // Supp-form equals the direct support intersection.
        std::vector<Word> ws{random_word(), random_word()};
        Event meet = Event::full(a.space());
        for (const Word& w : ws) meet = meet & ~fixed_event(a, w);
        CHECK(supp_cylinder_mass(irs, ws) == meet.measure());
    }
}

TEST_CASE("irs factor: pinned examples") {
    Action cyc = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 2, 3, 0}});
    auto f4 = irs_factor(cyc);
    CHECK(f4.class_action.space()->size() == 1);
    CHECK(is_factor_map(f4.to_classes).ok);

    // Two generators with non-normal stabilizers: three distinct classes and
    // a class action conjugate to the original.
    Action f2 = Action::with_default_names(AtomSpace::uniform(3),
                                           {Perm{1, 0, 2}, Perm{0, 2, 1}});
    auto ff = irs_factor(f2);
    CHECK(ff.class_action.space()->size() == 3);
    CHECK(is_factor_map(ff.to_classes).ok);
    CHECK(irs_equal(empirical_irs(ff.class_action), empirical_irs(f2)));

    Action ident = Action::with_default_names(AtomSpace::uniform(5), {Perm{0, 1, 2, 3, 4}});
    CHECK(irs_factor(ident).class_action.space()->size() == 1);
}

TEST_CASE("irs factor: equivariance and fidelity on random instances") {
    Rng rng(1013);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 10), kd(1, 2);
        Action a = random_action(nd(rng), kd(rng), rng);
        auto f = irs_factor(a);
        CHECK(is_factor_map(f.to_classes).ok);
        // class(g x) == transport(class(x)) for every atom and generator.
        for (std::uint32_t x = 0; x < a.space()->size(); ++x)
            for (std::size_t i = 0; i < a.arity(); ++i)
                CHECK(f.to_classes(a.gen(i)[x]) ==
                      f.class_action.gen(i)[f.to_classes(x)]);
        // Class masses are preserved by every transport permutation.
        for (std::size_t i = 0; i < a.arity(); ++i)
            for (std::uint32_t c = 0; c < f.class_action.space()->size(); ++c)
                CHECK(f.class_action.space()->weight(f.class_action.gen(i)[c]) ==
                      f.class_action.space()->weight(c));
    }
}

TEST_CASE("irs factor fidelity: equal-irs factor maps preserve classes atomwise") {
    Action alpha = Action::with_default_names(AtomSpace::uniform(2), {Perm{1, 0}});
    Action beta = Action::with_default_names(AtomSpace::uniform(4), {Perm{1, 0, 3, 2}});
    REQUIRE(irs_equal(empirical_irs(alpha), empirical_irs(beta)));
    FactorMap pi{beta, alpha, {0, 1, 0, 1}};
    REQUIRE(is_factor_map(pi).ok);
    for (std::uint32_t y = 0; y < 4; ++y)
        CHECK(canonical_rooted_schreier(beta, y) == canonical_rooted_schreier(alpha, pi(y)));
}
