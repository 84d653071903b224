#include "bdlab/linalg.hpp"
#include "bdlab/selfdet.hpp"
#include "bdlab/suites.hpp"

#include <doctest.h>

using namespace bdlab;

namespace {

std::shared_ptr<const WeightSchedule> t1()
{
    return std::make_shared<WeightSchedule>(toy_schedule_t1());
}

}

TEST_CASE("canonical node against the base")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    NodeId b = sp.base();
    NodeId c = sp.canonical(2);
    CHECK(sp.stage().coordinate(c, b) == make_q(1, 8));
    CHECK(sp.stage().coordinate(c, c) == 1);
    CHECK(sp.stage().coordinate(b, c) == 0);
    NodeId c2 = sp.canonical(3, 2);
    CHECK(sp.stage().coordinate(c2, b) == make_q(1, 64));
}

TEST_CASE("hand-computed coordinates of averages and Succ chains")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    SpaceStage& st = sp.stage();
    sp.base();
    NodeId c21 = sp.canonical(2, 1), c22 = sp.canonical(2, 2), c32 = sp.canonical(3, 2);
    NodeId c41 = sp.canonical(4, 1);
    NodeId g = sp.admit(age_one(4, 1, basic_average(st, {{1, c21}, {-1, c32}}, 2, 0, 3)));
    CHECK(st.coordinate(g, c21) == make_q(1, 16));
    CHECK(st.coordinate(g, c32) == make_q(-1, 16));
    CHECK(st.coordinate(g, sp.base()) == 0);

    NodeId a = sp.admit(age_one(3, 1, basic_average(st, {{1, c22}}, 1, 0, 2)));
    NodeId s = sp.admit(succ(5, a, 1, basic_average(st, {{1, c41}}, 1, 3, 4)));
    CHECK(st.coordinate(s, a) == 1);
    CHECK(st.coordinate(s, c22) == make_q(1, 8));
    CHECK(st.coordinate(s, c41) == make_q(1, 8));
    CHECK(st.age_of(s) == 2);
}

TEST_CASE("cached rows agree with recomputation from definitions")
{
    auto sp = scripted_xnr(t1(), 6);
    const SpaceStage& st = sp->stage();
    for (std::size_t g = 0; g < st.size(); ++g)
        for (std::size_t x = 0; x < st.size(); ++x)
            REQUIRE(st.coordinate(g, x) == st.coordinate_uncached(st.id(g), st.id(x)));

    SpaceStage micro = micro_bmt(t1(), 4);
    for (std::size_t g = 0; g < micro.size(); ++g)
        for (std::size_t x = 0; x < micro.size(); ++x)
            REQUIRE(micro.coordinate(g, x) == micro.coordinate_uncached(micro.id(g), micro.id(x)));
}

TEST_CASE("extension vectors restrict to unit vectors")
{
    SpaceStage st = micro_bmt(t1(), 4);
    for (Rank q = 1; q <= 4; ++q) {
        auto idx = st.indices_up_to(q);
        for (std::size_t eta : idx) {
            auto a = extend(st, eta, q);
            for (std::size_t g : idx) {
                Rational v = 0;
                for (const auto& [xi, c] : a)
                    v += c * st.coordinate(g, xi);
                REQUIRE(v == (g == eta ? 1 : 0));
            }
        }
    }
}

TEST_CASE("extension masses are recomputed by brute force")
{
    SpaceStage st = micro_bmt(t1(), 4);
    for (Rank q = 1; q <= 4; ++q) {
        ExtensionReport rep = check_extension_bound(st, q, 4);
        Rational worst = 0;
        for (std::size_t g : st.indices_up_to(4)) {
            // ℓ₁ mass of the row γ of r∘i_q: Σ_η |e*_γ(i_q e_η)|
            Rational mass = 0;
            for (std::size_t eta : st.indices_up_to(q)) {
                Rational v = 0;
                for (const auto& [xi, c] : extend(st, eta, q))
                    v += c * st.coordinate(g, xi);
                mass += abs_q(v);
            }
            worst = std::max(worst, mass);
        }
        CHECK(rep.max_mass == worst);
        CHECK(rep.pass());
    }
}

TEST_CASE("horizon norm of simple vectors")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    NodeId b = sp.base();
    sp.canonical(2);
    HorizonNorm z = horizon_norm(sp.stage(), BlockVector{});
    CHECK(z.lower == 0);
    CHECK(z.upper == 0);
    HorizonNorm h = horizon_norm(sp.stage(), unit_vector(b));
    CHECK(h.lower == 1);
    CHECK(h.upper == 2);
}

TEST_CASE("illegal nodes are rejected with the violated clause")
{
    SpaceStage st = make_bmt_stage(t1(), ThresholdPolicy::toy());
    NodeId b = st.register_node(base_node());
    CHECK_THROWS_AS(st.register_node(age_one(2, 3, basic_average(st, {{1, b}}, 1, 0, 1))),
        IllegalNode);
    NodeId a = st.register_node(age_one(2, 1, basic_average(st, {{1, b}}, 1, 0, 1)));
    // pred rank must be ≤ q − 1
    CHECK_THROWS_AS(st.register_node(succ(3, a, 1, basic_average(st, {{1, a}}, 1, 1, 2))),
        IllegalNode);
    CHECK_THROWS_AS(make_alpha_average({{1, b, {1, 1}}, {1, a, {2, 2}}}, 1, 0, 2), InvalidAverage);
    NodeId again = st.register_node(age_one(2, 1, basic_average(st, {{1, b}}, 1, 0, 1)));
    CHECK(again == a);
    CHECK(st.size() == 2);
}

TEST_CASE("exact elimination")
{
    linalg::Row r1{{0, 1}, {1, 2}}, r2{{0, 2}, {1, 4}}, r3{{2, make_q(1, 3)}};
    CHECK(linalg::rank({r1, r2, r3}) == 2);
    CHECK(linalg::in_span({r1, r3}, linalg::Row{{0, 3}, {1, 6}, {2, 1}}));
    CHECK_FALSE(linalg::in_span({r1}, r3));
}
