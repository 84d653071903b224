#include "bdlab/suites.hpp"

#include <doctest.h>

using namespace bdlab;

namespace {

std::shared_ptr<const WeightSchedule> t1()
{
    return std::make_shared<WeightSchedule>(toy_schedule_t1());
}

}

TEST_CASE("toy coding hands out 2, 3, ... and keeps prefixes comparable")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    sp.base();
    NodeId a = sp.canonical(2, 1), b = sp.canonical(3, 2);
    QElement s1{{a, unit_vector(a)}};
    QElement s2 = s1;
    s2.emplace_back(b, unit_vector(b));
    CHECK(sp.registry().sigma_register(sp.stage(), s1) == 2);
    CHECK(sp.registry().sigma_register(sp.stage(), s2) == 3);
    CHECK(sp.registry().sigma_register(sp.stage(), s1) == 2);
    CHECK(sp.registry().is_special(sp.stage(), s2));
    CHECK_FALSE(incomparable(sp.registry(), 2, 3));
    CHECK(incomparable(sp.registry(), 4, 5));
    CHECK_FALSE(incomparable(sp.registry(), 2, 4));
    // a second weight-1 entry breaks the σ rule
    QElement bad = s1;
    NodeId c = sp.canonical(3, 1);
    bad.emplace_back(c, unit_vector(c));
    CHECK_FALSE(sp.registry().is_special(sp.stage(), bad));
}

TEST_CASE("strict coding exceeds m_j times the last support")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Strict);
    sp.base();
    NodeId a = sp.canonical(3, 2);
    QElement s{{a, unit_vector(a)}};
    BigInt v = sp.registry().sigma_register(sp.stage(), s);
    CHECK(v > BigInt(64 * 3));
}

TEST_CASE("admission certifies non-basic averages")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    SpaceStage& st = sp.stage();
    sp.base();
    NodeId c21 = sp.canonical(2, 1), c31 = sp.canonical(3, 1), c32 = sp.canonical(3, 2);
    // weights 1, 1 are not incomparable and no special sequence is registered
    GammaNode plain = age_one(4, 1,
        make_alpha_average({{1, c21, {1, 2}}, {1, c31, {3, 3}}}, 2, 0, 3));
    CHECK_FALSE(sp.is_legal(plain));
    CHECK_THROWS(sp.admit(plain));
    NodeId bar = sp.admit_bar(plain);
    CHECK_FALSE(sp.in_gamma(bar));

    QElement s1{{c21, unit_vector(c21)}};
    QElement s2 = s1;
    s2.emplace_back(c32, unit_vector(c32));
    sp.registry().sigma_register(st, s1);
    sp.registry().sigma_register(st, s2);
    PairList pl;
    pl.pairs = {{c21, {1, 2}}, {c32, {3, 3}}};
    pl.signs = {-1, 1};
    pl.n = 2;
    Classification cl = classify_pairs(st, sp.registry(), pl);
    CHECK(cl.co);
    CHECK_FALSE(cl.ic);
    NodeId co = sp.admit(age_one(4, 1,
        make_alpha_average({{-1, c21, {1, 2}}, {1, c32, {3, 3}}}, 2, 0, 3, AvgKind::CO)));
    CHECK(sp.in_gamma(co));
    CHECK(sp.stage().coordinate(co, c21) == make_q(-1, 16));
}

TEST_CASE("evaluation analysis reproduces e*_γ on the scripted stage")
{
    auto sp = scripted_xnr(t1(), 8);
    const SpaceStage& st = sp->stage();
    for (std::size_t g = 0; g < st.size(); ++g) {
        if (st.node(g).variant == Variant::Base)
            continue;
        EvaluationAnalysis ea = evaluation_analysis(st, st.id(g));
        CHECK(static_cast<long>(ea.steps.size()) == st.age(g));
        DualFunctional f = ea.functional(st);
        for (std::size_t x : st.indices_up_to(st.rank(g)))
            REQUIRE(evaluate(st, f, unit_vector(st.id(x))) ==
                st.coordinate_uncached(st.id(g), st.id(x)));
    }
}

TEST_CASE("ramsey selection drops nodes on a common Succ chain")
{
    auto sp = scripted_xnr(t1(), 9);
    const SpaceStage& st = sp->stage();
    std::vector<NodeId> all;
    for (std::size_t g = 0; g < st.size(); ++g)
        all.push_back(st.id(g));
    auto kept = ramsey_basis_select(st, all);
    CHECK(kept.size() < all.size());
    for (std::size_t a = 0; a < kept.size(); ++a)
        for (std::size_t b = 0; b < kept.size(); ++b) {
            if (a == b)
                continue;
            NodeId cur = kept[b];
            while (st.node(cur).variant == Variant::Succ) {
                cur = st.node(cur).pred;
                CHECK(cur != kept[a]);
            }
        }
}
