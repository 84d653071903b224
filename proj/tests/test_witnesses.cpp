#include "bdlab/suites.hpp"

#include <doctest.h>

#include <numeric>

using namespace bdlab;

namespace {

std::shared_ptr<const WeightSchedule> t1()
{
    return std::make_shared<WeightSchedule>(toy_schedule_t1());
}

Rational direct(const SpaceStage& st, const NodeId& g, const BlockVector& x)
{
    Rational s = 0;
    for (const auto& [id, c] : x.coeffs)
        s += c * st.coordinate_uncached(g, id);
    return s;
}

}

TEST_CASE("Schreier partitions")
{
    auto p = schreier1_partition(1, 4);
    CHECK(p == std::vector<std::vector<long>>{{1}, {2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}});
    auto c = schreier1_partition(3, 3, 4);
    CHECK(c == std::vector<std::vector<long>>{{3, 4, 5}, {6, 7, 8, 9}, {10, 11, 12, 13}});
    for (const auto& F : schreier1_partition(2, 6, 5))
        CHECK(static_cast<long>(F.size()) <= F.front());
    CHECK_THROWS(schreier1_partition(0, 2));
}

TEST_CASE("basis blocks need a free rank between blocks")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    sp.base();
    CHECK_THROWS(basis_blocks(sp, basis_family(1), 2, 4, 1));
    NormedBlocks nb = basis_blocks(sp, basis_family(1), 2, 4, 2);
    REQUIRE(nb.blocks.size() == 4);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(evaluate(sp.stage(), d_star(sp.stage(), nb.normers[k]), nb.blocks[k]) == 1);
}

TEST_CASE("l1 certificate value by direct evaluation")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    sp.base();
    NormedBlocks nb = basis_blocks(sp, basis_family(1), 2, 8, 2);
    std::vector<long> picks{0, 2, 3, 6};
    std::vector<Rational> lam{make_q(3, 2), -2, make_q(-1, 5), 7};
    LowerCertificate lc = l1_lower_certificate(sp, nb, picks, lam, 1);
    Rational l1 = 0;
    for (const auto& l : lam)
        l1 += abs_q(l);
    CHECK(direct(sp.stage(), lc.gamma, lc.x) == l1 / 8);
    CHECK(lc.value == l1 / 8);
    CHECK_THROWS(l1_lower_certificate(sp, nb, {2, 1}, {1, 1}, 1));
}

TEST_CASE("exact pair and ρ-interval")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    sp.base();
    ExactPairParams p;
    p.theta = make_q(1, 64);
    NormedBlocks nb = exact_pair_layout(sp, basis_family(1), p, 8);
    ExactPair ep = build_exact_pair(sp, p, nb.blocks, nb.normers);
    CHECK(direct(sp.stage(), ep.gamma, ep.x) == p.theta);
    CHECK(check_exact_pair(sp.stage(), sp.gamma(), ep).pass());
    Interval E = rho_interval(sp.stage(), ep, p.theta / 2);
    Rational tol = 2 * p.C * 8 / 64;
    CHECK(abs_q(evaluate_atom(sp.stage(), ep.gamma, E, ep.x) - p.theta / 2) < tol);
    CHECK_THROWS(rho_interval(sp.stage(), ep, 2 * p.theta));
}

TEST_CASE("alternating blow-up of a short dependent sequence")
{
    XnrSpace sp(t1(), ThresholdPolicy::toy(), Mode::Toy);
    sp.base();
    DependentParams p;
    p.length = 3;
    p.theta = make_q(1, 64);
    DependentSequence ds = build_dependent_sequence(sp, p, {basis_family(1)});
    REQUIRE(ds.pairs.size() == 3);
    Blowup bw = blowup_witness(sp, ds, 1, BlowupPattern::Alternating);
    BlockVector s;
    for (std::size_t k = 0; k < 3; ++k)
        s += ds.pairs[k].x.scaled(k % 2 ? 1 : -1);
    CHECK(direct(sp.stage(), bw.gamma, s) == bw.value);
    CHECK(bw.value == make_q(3, 8) * p.theta);
    CHECK(bw.a == 3);
    CHECK_THROWS(blowup_witness(sp, ds, 1, BlowupPattern::Alternating, {}, 0, 0));
}

TEST_CASE("c0 estimate matches sign and interval enumeration")
{
    auto ws = t1();
    const Rank top = 5;
    auto sp = c0_stage(ws, top);
    const SpaceStage& st = sp->stage();
    std::vector<NodeId> basis;
    for (Rank r = 2; r <= top; ++r)
        basis.push_back(sp->canonical(r, r));
    std::vector<long> js{1};
    for (std::size_t k = 0; k + 1 < basis.size(); ++k)
        js.push_back(static_cast<long>(st.rank_of(basis[k])) + 1);
    C0Result res = c0_estimate(st, basis, js, 8, 3);

    long B = static_cast<long>(basis.size());
    Rational worst = 0;
    for (std::size_t g = 0; g < st.size(); ++g) {
        const GammaNode& node = st.node(g);
        if (node.variant == Variant::Base)
            continue;
        Rational mj(ws->m(node.j));
        for (unsigned mask = 1; mask < (1u << B); ++mask) {
            std::vector<long> ks;
            for (long k = 0; k < B; ++k)
                if (mask >> k & 1)
                    ks.push_back(k + 1);
            long n = static_cast<long>(ks.size());
            if (n > 3 || ks.front() < n || !(node.j < js[n - 1]))
                continue;
            for (unsigned sg = 0; sg < (1u << n); ++sg) {
                BlockVector x;
                for (long i = 0; i < n; ++i)
                    x.add(basis[ks[i] - 1], sg >> i & 1 ? -1 : 1);
                for (Rank lo = 1; lo <= top; ++lo)
                    for (Rank hi = lo; hi <= top; ++hi)
                        worst = std::max(worst, Rational(mj * abs_q(evaluate_atom(st, st.id(g), {lo, hi}, x))));
            }
        }
    }
    CHECK(res.worst_ratio == worst);
    CHECK(res.violations == 0);
}
