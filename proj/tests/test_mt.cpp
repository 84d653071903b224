#include "bdlab/mixed_tsirelson.hpp"

#include <doctest.h>

#include <functional>
#include <map>
#include <random>

using namespace bdlab;

namespace {

// T-norm by exhaustive compositions of every interval (1-unconditional, so covering pieces suffice)
Rational brute_norm(const WeightSchedule& ws, int k, const AuxVector& x, long jmax)
{
    std::size_t L = x.size();
    std::map<std::pair<std::size_t, std::size_t>, Rational> memo;
    std::function<Rational(std::size_t, std::size_t)> norm = [&](std::size_t lo, std::size_t hi) {
        auto key = std::make_pair(lo, hi);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        Rational best = 0;
        for (std::size_t i = lo; i <= hi; ++i)
            best = std::max(best, abs_q(x[i]));
        std::size_t len = hi - lo + 1;
        for (long j = 1; j <= jmax; ++j) {
            BigInt cap = ws.n(j) * k;
            // cut masks over the len−1 gaps
            for (unsigned long mask = 1; mask < (1ul << (len - 1)); ++mask) {
                unsigned long d = static_cast<unsigned long>(__builtin_popcountl(mask)) + 1;
                if (BigInt(d) > cap)
                    continue;
                Rational sum = 0;
                std::size_t start = lo;
                for (std::size_t g = 0; g < len - 1; ++g)
                    if (mask >> g & 1) {
                        sum += norm(start, lo + g);
                        start = lo + g + 1;
                    }
                sum += norm(start, hi);
                best = std::max(best, Rational(sum * ws.inv_m(j)));
            }
        }
        memo[key] = best;
        return best;
    };
    return L == 0 ? Rational(0) : norm(0, L - 1);
}

}

TEST_CASE("interval DP matches exhaustive compositions")
{
    NRule list;
    list.kind = NRule::Kind::List;
    list.values = {BigInt(8), BigInt(64), BigInt(512)};
    WeightSchedule small = make_schedule(8, list, Mode::Toy);
    WeightSchedule t1 = toy_schedule_t1();
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> num(-12, 12), den(1, 5);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t L = 1 + trial % 10;
        AuxVector x;
        for (std::size_t i = 0; i < L; ++i)
            x.push_back(make_q(num(rng), den(rng)));
        for (const WeightSchedule* ws : {&small, &t1}) {
            MtNorm m = mt_norm(*ws, 1, x, 3);
            REQUIRE(m.value == brute_norm(*ws, 1, x, 3));
        }
    }
}

TEST_CASE("piece limit binds for short schedules")
{
    NRule list;
    list.kind = NRule::Kind::List;
    list.values = {BigInt(8), BigInt(64)};
    WeightSchedule ws = make_schedule(8, list, Mode::Toy);
    AuxVector x(10, Rational(1));
    // ten singletons exceed k·n_1 = 8 pieces; a full split needs weight 2
    MtNorm m = mt_norm(ws, 1, x, 2);
    CHECK(m.value == brute_norm(ws, 1, x, 2));
    CHECK(m.value == 1);
}

TEST_CASE("explicit admissible functional")
{
    WeightSchedule ws = toy_schedule_t1();
    AuxVector x{1, -1, 2};
    CHECK(mt_functional(ws, 1, x, 1, {{1, 1}, {2, 3}}) == make_q(3, 8));
    CHECK(mt_functional(ws, 1, x, 1, {{1, 1}, {2, 2}, {3, 3}}) == make_q(1, 2));
    CHECK_THROWS(mt_functional(ws, 1, x, 1, {{1, 3}}));
}

TEST_CASE("flat averages in T1 stay within k/n_1 + 1/m_1")
{
    WeightSchedule ws = toy_schedule_t1();
    SccReport r = check_scc_lemma(ws, 1, 12, 4);
    CHECK(r.pass());
    for (const auto& row : r.rows)
        CHECK(row.lower >= make_q(row.k, 64));
}
