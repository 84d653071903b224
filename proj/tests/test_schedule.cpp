#include "bdlab/schedule.hpp"

#include <doctest.h>

using namespace bdlab;

TEST_CASE("T1 weights")
{
    WeightSchedule ws = toy_schedule_t1();
    CHECK(ws.m(1) == 8);
    CHECK(ws.m(3) == 512);
    CHECK(ws.n(1) == 64);
    CHECK(ws.n(2) == 4096);
    CHECK(ws.inv_m(2) == make_q(1, 64));
    CHECK_THROWS(ws.m(0));
}

TEST_CASE("tail sums agree with direct summation")
{
    WeightSchedule ws = toy_schedule_t1(40);
    Rational partial = 0;
    for (long j = 1; j <= 30; ++j)
        partial += make_q(BigInt(1), ipow(8, j));
    CHECK(ws.sum_inv_m() == make_q(1, 7));
    CHECK(ws.sum_inv_m() - partial == ws.tail_inv_m(30));
}

TEST_CASE("lacunarity: toy T1 passes the binding items only")
{
    WeightSchedule ws = toy_schedule_t1();
    LacunarityReport r = validate_strict(ws, 5);
    CHECK(r.binding_pass());
    bool c_fails = false;
    for (const auto& it : r.items) {
        if (it.item == 'a')
            CHECK(it.pass);
        if (it.item == 'c' && !it.pass)
            c_fails = true;
    }
    // n_j = 64^j stays below m_j² n_{j−1} = 64^{2j−1}
    CHECK(c_fails);
}

TEST_CASE("schedule constructor rejects bad rules")
{
    NRule list;
    list.kind = NRule::Kind::List;
    list.values = {BigInt(64), BigInt(32)};
    CHECK_THROWS(make_schedule(8, list, Mode::Toy));
    NRule p;
    CHECK_THROWS(make_schedule(4, p, Mode::Toy));
    WeightSchedule ws = toy_schedule_t1();
    WeightSchedule back = schedule_from_json(ws.to_json());
    CHECK(back.to_json() == ws.to_json());
}
