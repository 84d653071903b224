#include "bdlab/bmt.hpp"

#include <algorithm>
#include <set>

namespace bdlab {

namespace {

Verdict check_window(const SpaceStage& st, const AlphaAverage& a, Rank p, Rank q)
{
    std::set<NodeId> seen;
    for (const auto& e : a.entries) {
        if (e.E.empty())
            return Verdict::no("empty interval in average");
        if (e.E.lo <= p || e.E.hi > q)
            return Verdict::no("average interval not inside (" + std::to_string(p) + "," +
                std::to_string(q) + "]");
        Rank r = st.rank_of(e.node);
        if (r <= p || r > q)
            return Verdict::no("average node outside Γ̄_q∖Γ̄_p");
        if (!seen.insert(e.node).second)
            return Verdict::no("node repeated in average");
    }
    if (Rational(BigInt(static_cast<unsigned long>(a.entries.size())), a.size) > 1)
        return Verdict::no("coefficient mass exceeds 1");
    if (!st.divides_threshold(a.size, q + 1))
        return Verdict::no("size " + a.size.get_str() + " does not divide 𝒩_" + std::to_string(q + 1));
    return Verdict::yes();
}

}

Verdict is_legal_bmt_node(const SpaceStage& st, const GammaNode& g)
{
    if (g.variant == Variant::Base)
        return g.rank == 1 ? Verdict::yes() : Verdict::no("base node must have rank 1");
    Rank q = g.rank - 1;
    if (q < 1)
        return Verdict::no("rank must be ≥ 2");
    if (g.j < 1)
        return Verdict::no("weight index must be ≥ 1");
    if (g.variant == Variant::AgeOne) {
        if (g.j > g.rank)
            return Verdict::no("age-one weight index exceeds q+1");
        return check_window(st, g.avg, 0, q);
    }
    if (!st.contains(g.pred))
        return Verdict::no("pred not registered");
    const GammaNode& xi = st.node(g.pred);
    Rank p = xi.rank;
    if (p > q - 1)
        return Verdict::no("pred rank exceeds q−1");
    if (xi.variant == Variant::Base || xi.j != g.j)
        return Verdict::no("pred weight differs from m_j⁻¹");
    if (g.j > p)
        return Verdict::no("weight index exceeds pred rank");
    if (BigInt(st.age_of(g.pred)) >= st.schedule().n(g.j))
        return Verdict::no("age bound ag(ξ) < n_j violated");
    return check_window(st, g.avg, p, q);
}

AlphaAverage make_alpha_average(std::vector<AverageEntry> entries, const BigInt& n, Rank p,
    Rank q, AvgKind kind_hint)
{
    if (entries.empty())
        throw InvalidAverage("an average needs d ≥ 1 entries");
    if (n < 1)
        throw InvalidAverage("size must be positive");
    if (BigInt(static_cast<unsigned long>(entries.size())) > n)
        throw InvalidAverage("d ≤ n violated");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.sign != 1 && e.sign != -1)
            throw InvalidAverage("signs must be ±1");
        if (e.E.empty())
            throw InvalidAverage("empty interval");
        if (i > 0 && !(entries[i - 1].E.hi < e.E.lo))
            throw InvalidAverage("intervals not successive");
    }
    if (!(p < entries.front().E.lo))
        throw InvalidAverage("p < min E_1 violated");
    if (entries.back().E.hi > q)
        throw InvalidAverage("max E_d ≤ q violated");
    AlphaAverage a;
    a.size = n;
    a.entries = std::move(entries);
    a.p = p;
    a.q = q;
    a.kind = kind_hint;
    return a;
}

Verdict check_alpha_average(const SpaceStage& st, const AlphaAverage& a)
{
    try {
        make_alpha_average(a.entries, a.size, a.p, a.q, a.kind);
    } catch (const InvalidAverage& e) {
        return Verdict::no(e.what());
    }
    for (const auto& e : a.entries)
        if (!st.contains(e.node))
            return Verdict::no("unregistered node " + e.node);
    if (a.kind == AvgKind::Basic) {
        Rank prev = 0;
        for (const auto& e : a.entries) {
            Rank r = st.rank_of(e.node);
            if (!(e.E == Interval::point(r)))
                return Verdict::no("basic entry is not d*_γ");
            if (r <= prev)
                return Verdict::no("basic ranks not strictly increasing");
            prev = r;
        }
    } else if (a.kind != AvgKind::Plain) {
        long prev = 0;
        for (const auto& e : a.entries) {
            const GammaNode& g = st.node(e.node);
            if (g.variant == Variant::Base)
                return Verdict::no("weighted average entry without weight");
            if (g.j <= prev)
                return Verdict::no("weights not strictly decreasing");
            prev = g.j;
            if (g.rank < e.E.lo)
                return Verdict::no("rank(γ_i) ≥ min E_i violated");
        }
    }
    if (!st.divides_threshold(a.size, a.q + 1))
        return Verdict::no("n does not divide 𝒩_{q+1}");
    return Verdict::yes();
}

AlphaAverage basic_average(const SpaceStage& st, const std::vector<std::pair<int, NodeId>>& terms,
    const BigInt& n, Rank p, Rank q)
{
    std::vector<AverageEntry> es;
    for (const auto& [s, id] : terms)
        es.push_back({s, id, Interval::point(st.rank_of(id))});
    return make_alpha_average(std::move(es), n, p, q, AvgKind::Basic);
}

DualFunctional as_functional(const AlphaAverage& a)
{
    DualFunctional f;
    Rational inv = make_q(BigInt(1), a.size);
    for (const auto& e : a.entries)
        f.add(inv * e.sign, e.node, e.E);
    return f;
}

Rational evaluate(const SpaceStage& st, const AlphaAverage& a, const BlockVector& x)
{
    return evaluate(st, as_functional(a), x);
}

AlphaAverage restrict_average(const AlphaAverage& a, const Interval& E)
{
    AlphaAverage r = a;
    r.entries.clear();
    for (const auto& e : a.entries) {
        Interval f = e.E.intersect(E);
        if (!f.empty())
            r.entries.push_back({e.sign, e.node, f});
    }
    if (a.kind != AvgKind::Basic && a.kind != AvgKind::IC)
        r.kind = AvgKind::Plain;
    r.cert = {};
    if (r.kind == AvgKind::IC)
        r.cert.kinds = {AvgKind::IC};
    return r;
}

Interval average_range(const AlphaAverage& a)
{
    if (a.entries.empty())
        return {1, 0};
    return {a.entries.front().E.lo, a.entries.back().E.hi};
}

VfgResult is_very_fast_growing(const SpaceStage& st, const std::vector<AlphaAverage>& seq)
{
    VfgResult res;
    res.vfg = true;
    res.sizes_increasing = true;
    Rank prev_q = -1;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const auto& b = seq[k];
        Interval R = average_range(b);
        if (R.empty()) {
            res.vfg = false;
            res.reason = "empty average at k=" + std::to_string(k + 1);
            return res;
        }
        Rank p = k == 0 ? 0 : prev_q + 1;
        if (!(p < R.lo)) {
            res.vfg = false;
            res.reason = "no room for p_" + std::to_string(k + 1);
            return res;
        }
        for (const auto& e : b.entries) {
            if (st.rank_of(e.node) <= p) {
                res.vfg = false;
                res.reason = "entry node rank ≤ p_" + std::to_string(k + 1);
                return res;
            }
        }
        Rank limit = k + 1 < seq.size() ? average_range(seq[k + 1]).lo - 2 : R.hi + 256;
        Rank q = std::max(R.hi, p + 1);
        for (const auto& e : b.entries)
            q = std::max(q, st.rank_of(e.node));
        while (q <= limit && !st.divides_threshold(b.size, q + 1))
            ++q;
        if (q > limit) {
            res.vfg = false;
            res.reason = "no admissible q_" + std::to_string(k + 1);
            return res;
        }
        if (k > 0) {
            if (!st.meets_threshold(b.size, prev_q + 1)) {
                res.vfg = false;
                res.reason = "s(b_" + std::to_string(k + 1) + ") below 𝒩_" + std::to_string(prev_q + 1);
                return res;
            }
            if (!(seq[k - 1].size < b.size))
                res.sizes_increasing = false;
        }
        res.windows.emplace_back(p, q);
        prev_q = q;
    }
    return res;
}

SpaceStage make_bmt_stage(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th)
{
    SpaceStage st(std::move(ws), std::move(th), SpaceTag::Bmt);
    st.set_validator([](const SpaceStage& s, const GammaNode& g) {
        Verdict v = is_legal_bmt_node(s, g);
        if (!v)
            throw IllegalNode(v.reason);
    });
    return st;
}

GammaNode base_node()
{
    GammaNode g;
    g.variant = Variant::Base;
    g.rank = 1;
    return g;
}

GammaNode age_one(Rank rank, long j, AlphaAverage avg)
{
    GammaNode g;
    g.variant = Variant::AgeOne;
    g.rank = rank;
    g.j = j;
    g.avg = std::move(avg);
    return g;
}

GammaNode succ(Rank rank, const NodeId& pred, long j, AlphaAverage avg)
{
    GammaNode g;
    g.variant = Variant::Succ;
    g.rank = rank;
    g.pred = pred;
    g.j = j;
    g.avg = std::move(avg);
    return g;
}

GammaNode canonical_node(const SpaceStage& st, Rank rank, long j)
{
    NodeId b = content_id(base_node());
    if (!st.contains(b))
        throw UnknownNode("base node not registered");
    return age_one(rank, j, basic_average(st, {{1, b}}, 1, 0, rank - 1));
}

}
