#include "bdlab/selfdet.hpp"

#include "bdlab/kernels.hpp"
#include "bdlab/linalg.hpp"

#include <algorithm>
#include <random>

namespace bdlab {

namespace {

std::vector<char> membership(const SpaceStage& st, const SubsetSpec& sub)
{
    std::vector<char> m(st.size(), 0);
    for (std::size_t i = 0; i < st.size(); ++i)
        m[i] = sub.contains(st.id(i)) ? 1 : 0;
    return m;
}

// Σ a_ξ d_ξ over Γ_q whose coordinates on Γ_q are x (forward solve in rank order)
std::map<std::size_t, Rational> extend_vector(const SpaceStage& st,
    const std::map<std::size_t, Rational>& x, Rank q)
{
    std::map<std::size_t, Rational> a;
    for (std::size_t z : st.indices_up_to(q)) {
        Rational v = 0;
        if (auto it = x.find(z); it != x.end())
            v = it->second;
        for (const auto& [k, c] : st.row(z)) {
            if (k == z)
                continue;
            if (auto it = a.find(k); it != a.end())
                v -= c * it->second;
        }
        if (v != 0)
            a.emplace(z, v);
    }
    return a;
}

// coordinate of Σ a_ξ d_ξ at η
Rational coord_of(const SpaceStage& st, std::size_t eta, const std::map<std::size_t, Rational>& a)
{
    Rational s = 0;
    for (const auto& [k, c] : st.row(eta))
        if (auto it = a.find(k); it != a.end())
            s += c * it->second;
    return s;
}

std::string pair_str(const SpaceStage& st, std::size_t a, std::size_t b)
{
    return st.id(a) + "," + st.id(b);
}

}

std::map<Rank, std::vector<NodeId>> SubsetSpec::trace(const SpaceStage& st, Rank Q) const
{
    std::map<Rank, std::vector<NodeId>> out;
    for (std::size_t i : st.indices_up_to(Q))
        if (contains(st.id(i)))
            out[st.rank(i)].push_back(st.id(i));
    return out;
}

std::vector<Rank> SubsetSpec::S(const SpaceStage& st, Rank Q) const
{
    std::vector<Rank> out;
    for (const auto& kv : trace(st, Q))
        out.push_back(kv.first);
    return out;
}

nlohmann::json SubsetSpec::to_json(const SpaceStage& st) const
{
    nlohmann::json j;
    j["tag"] = tag;
    j["members"] = std::vector<NodeId>(members.begin(), members.end());
    nlohmann::json tr = nlohmann::json::object();
    for (const auto& [r, ids] : trace(st, st.max_rank()))
        tr[std::to_string(r)] = ids;
    j["trace"] = tr;
    j["S"] = S(st, st.max_rank());
    return j;
}

SubsetSpec SubsetSpec::from_json(const nlohmann::json& j)
{
    SubsetSpec s;
    s.tag = j.value("tag", std::string("custom"));
    if (j.contains("members")) {
        for (const auto& id : j.at("members"))
            s.members.insert(id.get<std::string>());
    } else if (j.contains("trace")) {
        for (const auto& [r, ids] : j.at("trace").items())
            for (const auto& id : ids)
                s.members.insert(id.get<std::string>());
    }
    return s;
}

SubsetSpec full_subset(const SpaceStage& st, std::string tag)
{
    SubsetSpec s;
    s.tag = std::move(tag);
    for (std::size_t i = 0; i < st.size(); ++i)
        s.members.insert(st.id(i));
    return s;
}

SubsetSpec reference_closure(const SpaceStage& st, const std::set<NodeId>& seeds, std::string tag)
{
    SubsetSpec s;
    s.tag = std::move(tag);
    std::vector<NodeId> todo(seeds.begin(), seeds.end());
    while (!todo.empty()) {
        NodeId id = todo.back();
        todo.pop_back();
        if (!s.members.insert(id).second)
            continue;
        const GammaNode& g = st.node(id);
        if (g.variant == Variant::Succ)
            todo.push_back(g.pred);
        for (const auto& e : g.avg.entries)
            todo.push_back(e.node);
    }
    return s;
}

nlohmann::json SelfDetVerdict::to_json() const
{
    nlohmann::json j;
    j["Q"] = Q;
    j["self_determined"] = self_determined();
    j["d"] = d;
    j["b"] = b;
    j["e"] = e;
    j["agree"] = agree();
    j["registry_complete"] = complete;
    j["verdict_scope"] = "up to rank " + std::to_string(Q);
    if (witness)
        j["witness"] = {{"eta", witness->first}, {"gamma", witness->second}};
    if (!b)
        j["failing_rank_b"] = failing_rank_b;
    return j;
}

SelfDetVerdict check_self_determined(const SpaceStage& st, const SubsetSpec& sub, Rank Q,
    bool complete)
{
    SelfDetVerdict v;
    v.Q = Q;
    v.complete = complete;
    auto member = membership(st, sub);
    auto all = st.indices_up_to(Q);
    std::vector<std::size_t> inside, outside;
    for (std::size_t i : all)
        (member[i] ? inside : outside).push_back(i);

    // (d) e*_η(d_γ) = 0
    if (auto p = kernels::vanishing_violation_parallel(st, inside, member)) {
        v.d = false;
        v.witness = std::make_pair(st.id(p->first), st.id(p->second));
    }

    // (b) span{d*_γ : γ ∈ Γ′_q} = span{e*_γ : γ ∈ Γ′_q}, rank by rank
    linalg::Echelon es;
    std::size_t pos = 0;
    for (Rank q : st.ranks()) {
        if (q > Q)
            break;
        std::vector<std::size_t> layer;
        while (pos < inside.size() && st.rank(inside[pos]) == q)
            layer.push_back(inside[pos++]);
        bool ok = true;
        for (std::size_t eta : layer) {
            linalg::Row r;
            for (const auto& [k, c] : st.row(eta))
                r[static_cast<std::uint32_t>(k)] = c;
            // e*_η in span of the unit functionals of Γ′_q
            for (const auto& kv : r)
                if (!member[kv.first])
                    ok = false;
            es.insert(std::move(r));
        }
        // each d*_η back in the span of the e*'s
        for (std::size_t i = 0; i < pos && ok; ++i) {
            linalg::Row unit{{static_cast<std::uint32_t>(inside[i]), Rational(1)}};
            if (!es.reduce(unit).empty())
                ok = false;
        }
        if (!ok) {
            v.b = false;
            v.failing_rank_b = q;
            break;
        }
    }

    // (e) c*_η(d_γ) = 0, evaluated through the c* functional rather than the rows
    for (std::size_t eta : inside) {
        if (!v.e)
            break;
        DualFunctional c = c_star(st, st.id(eta));
        if (c.terms.empty())
            continue;
        for (std::size_t g : outside) {
            if (st.rank(g) >= st.rank(eta))
                break;
            if (evaluate(st, c, unit_vector(st.id(g))) != 0) {
                v.e = false;
                if (!v.witness)
                    v.witness = std::make_pair(st.id(eta), st.id(g));
                break;
            }
        }
    }
    return v;
}

Interval Quotient::map_interval(const Interval& E) const
{
    Rank lo = std::lower_bound(S.begin(), S.end(), E.lo) - S.begin() + 1;
    Rank hi = E.hi == kRankInf ? kRankInf : std::upper_bound(S.begin(), S.end(), E.hi) - S.begin();
    return {lo, hi};
}

Rank Quotient::map_rank(Rank q) const
{
    return std::upper_bound(S.begin(), S.end(), q) - S.begin();
}

Quotient quotient_stage(const SpaceStage& st, const SubsetSpec& sub)
{
    Rank top = st.max_rank();
    SelfDetVerdict v = check_self_determined(st, sub, top);
    if (!v.d)
        throw UnverifiedSubset("subset is not self-determined up to rank " + std::to_string(top) +
            " (witness " + v.witness->first + "," + v.witness->second + ")");
    Quotient qt{SpaceStage(st.schedule_ptr(), st.thresholds(), SpaceTag::Quotient), {}, {},
        sub.S(st, top)};
    for (std::size_t i : st.indices_up_to(top)) {
        const NodeId& id = st.id(i);
        if (!sub.contains(id))
            continue;
        GammaNode g = st.node(i);
        if (g.variant == Variant::Succ) {
            auto it = qt.to_quotient.find(g.pred);
            if (it == qt.to_quotient.end())
                throw UnverifiedSubset("pred of " + id + " lies outside the subset");
            g.pred = it->second;
        }
        std::vector<AverageEntry> entries;
        for (const auto& e : g.avg.entries) {
            auto it = qt.to_quotient.find(e.node);
            if (it == qt.to_quotient.end())
                throw UnverifiedSubset("average of " + id + " references a node outside the subset");
            Interval E = qt.map_interval(e.E);
            if (!E.empty())
                entries.push_back({e.sign, it->second, E});
        }
        g.avg.entries = std::move(entries);
        g.avg.p = qt.map_rank(g.avg.p);
        g.rank = qt.map_rank(g.rank);
        g.avg.q = g.rank - 1;
        NodeId nid;
        try {
            nid = qt.stage.register_unchecked(g);
        } catch (const IllegalNode& e) {
            throw UnverifiedSubset(std::string("quotient node rejected: ") + e.what());
        }
        qt.to_quotient.emplace(id, nid);
        qt.from_quotient.emplace(nid, id);
    }
    return qt;
}

BlockVector restrict(const SpaceStage& st, const Quotient& qt, const BlockVector& x)
{
    BlockVector r;
    for (const auto& [id, c] : x.coeffs) {
        if (!st.contains(id))
            throw UnknownNode("unregistered node " + id);
        if (auto it = qt.to_quotient.find(id); it != qt.to_quotient.end())
            r.add(it->second, c);
    }
    return r;
}

std::map<std::size_t, Rational> extend(const SpaceStage& st, std::size_t eta, Rank q)
{
    return extend_vector(st, {{eta, Rational(1)}}, q);
}

bool Section1Report::pass() const
{
    return std::all_of(items.begin(), items.end(), [](const SuiteItem& i) { return i.pass; });
}

nlohmann::json Section1Report::to_json() const
{
    nlohmann::json j;
    j["subset"] = tag;
    j["Q"] = Q;
    j["pass"] = pass();
    j["verdict"] = verdict.to_json();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& i : items) {
        nlohmann::json e{{"item", i.name}, {"pass", i.pass}, {"checked", i.checked}};
        if (!i.witness.empty())
            e["witness"] = i.witness;
        arr.push_back(e);
    }
    j["items"] = arr;
    return j;
}

Section1Report verify_section1_suite(const SpaceStage& st, const SubsetSpec& sub, Rank Q,
    unsigned seed)
{
    Section1Report rep;
    rep.tag = sub.tag;
    rep.Q = Q;
    rep.verdict = check_self_determined(st, sub, Q);
    auto member = membership(st, sub);
    auto all = st.indices_up_to(Q);

    {
        SuiteItem it{"equivalence (b)=(d)=(e)", rep.verdict.agree(), {}, 3};
        if (!it.pass)
            it.witness = "d=" + std::to_string(rep.verdict.d) + " b=" + std::to_string(rep.verdict.b) +
                " e=" + std::to_string(rep.verdict.e);
        rep.items.push_back(it);
    }

    // (1) i_q[ℓ∞(Γ″_q)] = span{d_γ : γ ∈ Γ″_q}
    {
        SuiteItem it{"complement subspace", true, {}, 0};
        for (Rank q : st.ranks()) {
            if (q > Q || !it.pass)
                break;
            std::vector<linalg::Row> images;
            for (std::size_t eta : st.indices_up_to(q)) {
                if (member[eta])
                    continue;
                linalg::Row r;
                for (const auto& [k, c] : extend(st, eta, q)) {
                    if (member[k]) {
                        it.pass = false;
                        it.witness = "i_" + std::to_string(q) + "(e_" + st.id(eta) + ") has d_" +
                            st.id(k) + " component";
                    }
                    r[static_cast<std::uint32_t>(k)] = c;
                }
                images.push_back(std::move(r));
                ++it.checked;
            }
            if (it.pass && linalg::rank(images) != images.size()) {
                it.pass = false;
                it.witness = "rank deficit at q=" + std::to_string(q);
            }
        }
        rep.items.push_back(it);
    }

    std::optional<Quotient> qt;
    std::string refusal;
    try {
        qt = quotient_stage(st, sub);
    } catch (const UnverifiedSubset& e) {
        refusal = e.what();
    }
    auto qidx = [&](std::size_t i) { return qt->stage.index_of(qt->to_quotient.at(st.id(i))); };
    std::vector<Rank> S = sub.S(st, Q);

    // (2) R(i_{q_s}(e_η)) = i′_{q_s}(r′_{q_s}(e_η))
    {
        SuiteItem it{"commute", true, {}, 0};
        for (std::size_t s = 0; s < S.size() && it.pass; ++s) {
            Rank q = S[s];
            for (std::size_t eta : st.indices_up_to(q)) {
                auto lhs = extend(st, eta, q);
                std::map<std::size_t, Rational> rhs;
                if (member[eta] && qt)
                    rhs = extend(qt->stage, qidx(eta), static_cast<Rank>(s + 1));
                for (std::size_t z : all) {
                    if (!member[z])
                        continue;
                    Rational a = coord_of(st, z, lhs);
                    Rational b;
                    if (!member[eta])
                        b = 0;
                    else if (qt)
                        b = coord_of(qt->stage, qidx(z), rhs);
                    else
                        b = a;
                    ++it.checked;
                    if (a != b) {
                        it.pass = false;
                        it.witness = "q_s=" + std::to_string(q) + " eta=" + st.id(eta) + " at " + st.id(z);
                        break;
                    }
                }
                if (!it.pass)
                    break;
            }
        }
        rep.items.push_back(it);
    }

    // (3) R(d_γ) = d′_γ, R(d_γ) = 0, R*(e*) = e*, R*(d′*) = d*, R*(c′*) = c*
    {
        SuiteItem r1{"R(d_γ)=d′_γ", true, {}, 0}, r2{"R(d_γ)=0 off Γ′", true, {}, 0},
            r3{"R*(e*_γ)=e*_γ", true, {}, 0}, r4{"R*(d′*_γ)=d*_γ", true, {}, 0},
            r5{"R*(c′*_γ)=c*_γ", true, {}, 0};
        auto fail = [](SuiteItem& it, std::string w) {
            if (it.pass) {
                it.pass = false;
                it.witness = std::move(w);
            }
        };
        if (!qt) {
            for (auto* it : {&r1, &r3, &r4, &r5})
                fail(*it, "quotient refused: " + refusal);
        }
        for (std::size_t xi : all) {
            BlockVector rx;
            std::map<std::size_t, Rational> back;
            if (qt) {
                rx = restrict(st, *qt, unit_vector(st.id(xi)));
                // d′*_γ via the quotient FDD: coordinates of R(d_ξ) expanded back in d′
                std::map<std::size_t, Rational> coords;
                for (std::size_t z = 0; z < qt->stage.size(); ++z) {
                    Rational c = 0;
                    for (const auto& [id, a] : rx.coeffs)
                        c += a * qt->stage.coordinate(z, qt->stage.index_of(id));
                    if (c != 0)
                        coords.emplace(z, c);
                }
                back = extend_vector(qt->stage, coords, qt->stage.max_rank());
            }
            for (std::size_t g : all) {
                if (!member[g])
                    continue;
                Rational orig = st.coordinate(g, xi);
                if (!member[xi]) {
                    ++r2.checked;
                    if (orig != 0)
                        fail(r2, "e*_" + st.id(g) + "(d_" + st.id(xi) + ")≠0");
                }
                if (!qt)
                    continue;
                Rational img = member[xi] ? qt->stage.coordinate(qidx(g), qidx(xi)) : Rational(0);
                ++r3.checked;
                if (orig != img)
                    fail(r3, pair_str(st, g, xi));
                if (member[xi]) {
                    ++r1.checked;
                    if (orig != img)
                        fail(r1, pair_str(st, g, xi));
                }
                NodeId gq = qt->to_quotient.at(st.id(g));
                Rational dq = 0;
                if (auto f = back.find(qt->stage.index_of(gq)); f != back.end())
                    dq = f->second;
                ++r4.checked;
                if (dq != (g == xi ? 1 : 0))
                    fail(r4, pair_str(st, g, xi));
                ++r5.checked;
                if (evaluate(qt->stage, c_star(qt->stage, gq), rx) !=
                    evaluate(st, c_star(st, st.id(g)), unit_vector(st.id(xi))))
                    fail(r5, pair_str(st, g, xi));
            }
        }
        for (auto* it : {&r1, &r2, &r3, &r4, &r5})
            rep.items.push_back(*it);
    }

    // (4) compatibility of (i′_{q_s}) and e*_γ∘P_E(d_ξ) = e*_γ∘P′_{E′}(d′_ξ)
    {
        SuiteItem comp{"compatibility of i′", true, {}, 0};
        SuiteItem bars{"intervals E′", true, {}, 0};
        if (!qt) {
            comp.pass = bars.pass = false;
            comp.witness = bars.witness = "quotient refused: " + refusal;
        } else {
            const SpaceStage& qs = qt->stage;
            Rank top = qt->map_rank(Q);
            for (Rank s = 1; s <= top && comp.pass; ++s) {
                for (std::size_t eta : qs.indices_up_to(s)) {
                    auto a = extend(qs, eta, s);
                    for (Rank t = s + 1; t <= top && comp.pass; ++t) {
                        std::map<std::size_t, Rational> y;
                        for (std::size_t z : qs.indices_up_to(t)) {
                            Rational c = coord_of(qs, z, a);
                            if (c != 0)
                                y.emplace(z, c);
                        }
                        ++comp.checked;
                        if (extend_vector(qs, y, t) != a) {
                            comp.pass = false;
                            comp.witness = "s=" + std::to_string(s) + " t=" + std::to_string(t) +
                                " eta=" + qs.id(eta);
                        }
                    }
                }
            }
            for (std::size_t g : all) {
                if (!member[g])
                    continue;
                for (std::size_t xi : all) {
                    if (!member[xi])
                        continue;
                    for (Rank lo = 1; lo <= Q; ++lo)
                        for (Rank hi = lo; hi <= Q; ++hi) {
                            Interval E{lo, hi};
                            Interval Ep = qt->map_interval(E);
                            Rational a = evaluate_atom(st, st.id(g), E, unit_vector(st.id(xi)));
                            Rational b = evaluate_atom(qs, qt->to_quotient.at(st.id(g)), Ep,
                                unit_vector(qt->to_quotient.at(st.id(xi))));
                            ++bars.checked;
                            if (a != b && bars.pass) {
                                bars.pass = false;
                                bars.witness = pair_str(st, g, xi) + " E=[" + std::to_string(lo) +
                                    "," + std::to_string(hi) + "]";
                            }
                        }
                }
            }
        }
        rep.items.push_back(comp);
        rep.items.push_back(bars);
    }

    // kernel: R(x) = 0 iff x ∈ span{d_γ : γ ∉ Γ′}
    {
        SuiteItem it{"kernel", true, {}, 0};
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> coef(-3, 3);
        std::vector<std::size_t> inside, outside;
        for (std::size_t i : all)
            (member[i] ? inside : outside).push_back(i);
        for (int trial = 0; trial < 24; ++trial) {
            BlockVector x;
            // alternate between vectors supported off Γ′ and mixed ones
            const auto& pool = (trial % 2 == 0 && !outside.empty()) ? outside : all;
            for (std::size_t i : pool)
                if (rng() % 3 == 0)
                    x.add(st.id(i), coef(rng));
            bool r_zero = true;
            for (std::size_t g : inside) {
                Rational c = 0;
                for (const auto& [id, a] : x.coeffs)
                    c += a * st.coordinate(g, st.index_of(id));
                if (c != 0) {
                    r_zero = false;
                    break;
                }
            }
            std::vector<linalg::Row> ys;
            for (std::size_t o : outside)
                ys.push_back({{static_cast<std::uint32_t>(o), Rational(1)}});
            linalg::Row xr;
            for (const auto& [id, a] : x.coeffs)
                xr[static_cast<std::uint32_t>(st.index_of(id))] = a;
            bool in_y = linalg::in_span(ys, xr);
            ++it.checked;
            if (r_zero != in_y) {
                it.pass = false;
                it.witness = "trial " + std::to_string(trial);
                break;
            }
        }
        rep.items.push_back(it);
    }
    return rep;
}

}
