#include "bdlab/linalg.hpp"
#include "bdlab/suites.hpp"

#include <doctest.h>

using namespace bdlab;

namespace {

// span{d*_γ : γ ∈ Γ′} = span{e*_γ : γ ∈ Γ′} on the coordinates of rank ≤ Q
bool spans_agree(const SpaceStage& st, const SubsetSpec& s, Rank Q)
{
    std::vector<linalg::Row> D, E;
    auto idx = st.indices_up_to(Q);
    for (std::size_t g : idx) {
        if (!s.contains(st.id(g)))
            continue;
        D.push_back(linalg::Row{{static_cast<std::uint32_t>(g), Rational(1)}});
        linalg::Row e;
        for (std::size_t x : idx) {
            Rational v = st.coordinate(g, x);
            if (v != 0)
                e[static_cast<std::uint32_t>(x)] = v;
        }
        E.push_back(e);
    }
    std::vector<linalg::Row> both = D;
    both.insert(both.end(), E.begin(), E.end());
    std::size_t r = linalg::rank(both);
    return r == linalg::rank(D) && r == linalg::rank(E);
}

}

TEST_CASE("condition (d) agrees with an exact span comparison")
{
    auto ws = std::make_shared<WeightSchedule>(toy_schedule_t1());
    auto sp = scripted_xnr(ws, 6);
    const SpaceStage& st = sp->stage();
    auto subs = generated_subsets(*sp, 6, 7);
    CHECK(subs.size() >= 10);
    bool saw_negative = false;
    for (const auto& s : subs)
        for (Rank q = 1; q <= 6; ++q) {
            SelfDetVerdict v = check_self_determined(st, s, q);
            INFO(s.tag, " Q=", q);
            CHECK(v.agree());
            CHECK(v.d == spans_agree(st, s, q));
            if (s.tag == "negative" && q == 6) {
                saw_negative = true;
                REQUIRE(v.witness);
                CHECK(st.coordinate(v.witness->first, v.witness->second) != 0);
            }
        }
    CHECK(saw_negative);
}

TEST_CASE("quotient by the full set reproduces the coordinates")
{
    auto ws = std::make_shared<WeightSchedule>(toy_schedule_t1());
    SpaceStage st = micro_bmt(ws, 3);
    Quotient qt = quotient_stage(st, full_subset(st));
    CHECK(qt.stage.size() == st.size());
    for (std::size_t g = 0; g < st.size(); ++g)
        for (std::size_t x = 0; x < st.size(); ++x)
            CHECK(qt.stage.coordinate(qt.to_quotient.at(st.id(g)), qt.to_quotient.at(st.id(x))) ==
                st.coordinate(g, x));
}

TEST_CASE("quotient refuses a subset that is not self-determined")
{
    auto ws = std::make_shared<WeightSchedule>(toy_schedule_t1());
    auto sp = scripted_xnr(ws, 6);
    for (const auto& s : generated_subsets(*sp, 6, 7))
        if (s.tag == "negative")
            CHECK_THROWS_AS(quotient_stage(sp->stage(), s), UnverifiedSubset);
}

TEST_CASE("micro closure passes the quotient suite")
{
    auto ws = std::make_shared<WeightSchedule>(toy_schedule_t1());
    SpaceStage st = micro_bmt(ws, 4);
    std::size_t top = st.at_rank(4).back();
    SubsetSpec s = reference_closure(st, {st.id(top)}, "closure");
    Section1Report r = verify_section1_suite(st, s, 4);
    CHECK(r.pass());
}
