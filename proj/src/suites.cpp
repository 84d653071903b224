#include "bdlab/suites.hpp"
#include "bdlab/mixed_tsirelson.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace bdlab {

namespace {

using Terms = std::vector<std::pair<int, NodeId>>;

Rational qn(std::size_t n) { return Rational(BigInt(static_cast<unsigned long>(n))); }

nlohmann::json mode_of(const RunConfig& cfg, const WeightSchedule& ws)
{
    return {{"seed", cfg.seed}, {"coding", to_string(cfg.coding)}, {"schedule", ws.to_json()},
        {"thresholds", "explicit"}};
}

Report fresh(const std::string& name, const RunConfig& cfg, const WeightSchedule& ws)
{
    Report r;
    r.suite = name;
    r.mode = mode_of(cfg, ws);
    return r;
}

// counts failures over many instances and keeps the first witness
struct Tally {
    std::size_t seen = 0;
    std::size_t bad = 0;
    std::string first;
    void add(bool ok, const std::string& w)
    {
        ++seen;
        if (!ok && bad++ == 0)
            first = w;
    }
    Check flag(const std::string& claim) const
    {
        std::string note = std::to_string(seen) + " instances";
        if (bad)
            note += ", " + std::to_string(bad) + " failing, first " + first;
        return make_flag(claim, bad == 0, note);
    }
};

SourceFamily diagonal_family()
{
    SourceFamily f;
    f.name = "diagonal";
    f.make = [](XnrSpace& sp, Rank r) {
        NodeId eta = sp.canonical(r, static_cast<long>(r));
        return std::make_pair(unit_vector(eta), eta);
    };
    return f;
}

std::vector<SubsetSpec> micro_subsets(const SpaceStage& st)
{
    std::vector<SubsetSpec> out;
    out.push_back(full_subset(st));
    for (Rank r = 1; r < st.max_rank(); ++r) {
        SubsetSpec s;
        s.tag = "prefix" + std::to_string(r);
        for (std::size_t i : st.indices_up_to(r))
            s.members.insert(st.id(i));
        out.push_back(std::move(s));
    }
    Rank top = st.max_rank();
    int n = 0;
    for (std::size_t i : st.at_rank(top)) {
        const GammaNode& g = st.node(i);
        bool mixed = g.avg.entries.size() > 1;
        if (g.variant != Variant::Succ && !mixed)
            continue;
        out.push_back(reference_closure(st, {st.id(i)}, "closure" + std::to_string(++n)));
    }
    return out;
}

}

std::shared_ptr<const WeightSchedule> RunConfig::weights() const
{
    if (schedule.is_null())
        return std::make_shared<WeightSchedule>(toy_schedule_t1());
    return std::make_shared<WeightSchedule>(schedule_from_json(schedule));
}

nlohmann::json RunConfig::to_json() const
{
    nlohmann::json j;
    j["schedule"] = weights()->to_json();
    j["coding"] = bdlab::to_string(coding);
    j["Q"] = Q;
    j["analysis_Q"] = analysis_Q;
    j["micro_Q"] = micro_Q;
    j["suites"] = suites;
    j["out"] = out;
    j["seed"] = seed;
    j["theta"] = bdlab::to_string(theta);
    j["C"] = bdlab::to_string(C);
    j["length"] = length;
    j["window_cap"] = window_cap;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j)
{
    RunConfig c;
    if (j.contains("schedule"))
        c.schedule = j.at("schedule");
    if (j.contains("coding"))
        c.coding = parse_mode(j.at("coding").get<std::string>());
    if (j.contains("Q"))
        c.Q = j.at("Q").get<Rank>();
    if (j.contains("analysis_Q"))
        c.analysis_Q = j.at("analysis_Q").get<Rank>();
    if (j.contains("micro_Q"))
        c.micro_Q = j.at("micro_Q").get<Rank>();
    if (j.contains("suites"))
        c.suites = j.at("suites").get<std::vector<std::string>>();
    if (j.contains("out"))
        c.out = j.at("out").get<std::string>();
    if (j.contains("seed"))
        c.seed = j.at("seed").get<unsigned>();
    auto rat = [&](const char* k, Rational& v) {
        if (!j.contains(k))
            return;
        const auto& x = j.at(k);
        v = x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>());
    };
    rat("theta", c.theta);
    rat("C", c.C);
    if (j.contains("length"))
        c.length = j.at("length").get<long>();
    if (j.contains("window_cap"))
        c.window_cap = j.at("window_cap").get<long>();
    if (c.Q < 1 || c.analysis_Q < 1 || c.micro_Q < 1)
        throw std::invalid_argument("horizons must be ≥ 1");
    return c;
}

std::unique_ptr<XnrSpace> scripted_xnr(std::shared_ptr<const WeightSchedule> ws, Rank Q)
{
    // CO certificates below rely on toy σ-values 2, 3 for the first two registered sequences
    auto sp = std::make_unique<XnrSpace>(std::move(ws), ThresholdPolicy::toy(), Mode::Toy);
    SpaceStage& st = sp->stage();
    sp->base();
    auto c = [&](Rank r, long j) { return sp->canonical(r, j); };
    for (Rank r = 2; r <= Q; ++r) {
        c(r, 1);
        c(r, 2);
        if (r >= 3)
            c(r, 3);
    }
    if (Q >= 4)
        c(4, 4);
    if (Q >= 5)
        c(5, 5);

    for (Rank r = 4; r <= Q; ++r)
        sp->admit(age_one(r, 1, basic_average(st, {{1, c(2, 1)}, {-1, c(3, 2)}}, 2, 0, r - 1)));
    for (Rank r = 3; r <= Q; ++r)
        sp->admit(age_one(r, 2, basic_average(st, {{1, c(r - 1, 1)}}, 1, 0, r - 1)));

    // Succ chains of weights 1, 2, 3
    if (Q >= 3) {
        NodeId a = sp->admit(age_one(3, 1, basic_average(st, {{1, c(2, 2)}}, 1, 0, 2)));
        for (Rank R = 5; R <= Q; R += 2)
            a = sp->admit(succ(R, a, 1,
                basic_average(st, {{1, c(R - 1, R % 4 == 1 ? 1 : 2)}}, 1, R - 2, R - 1)));
        NodeId t = sp->admit(age_one(3, 3, basic_average(st, {{1, c(2, 1)}}, 1, 0, 2)));
        if (Q >= 6)
            sp->admit(succ(6, t, 3, basic_average(st, {{1, c(4, 1)}, {-1, c(5, 2)}}, 2, 3, 5)));
    }
    if (Q >= 4) {
        NodeId b = sp->admit(age_one(4, 2, basic_average(st, {{1, c(2, 1)}, {1, c(3, 1)}}, 2, 0, 3)));
        for (Rank R = 6; R <= Q; R += 2)
            b = sp->admit(succ(R, b, 2, basic_average(st, {{-1, c(R - 1, 2)}}, 2, R - 2, R - 1)));
    }

    // incomparable weights 4, 5 stay outside the σ-image
    if (Q >= 6)
        sp->admit(age_one(6, 1,
            make_alpha_average({{1, c(4, 4), {2, 4}}, {1, c(5, 5), {5, 5}}}, 2, 0, 5, AvgKind::IC)));

    if (Q >= 4) {
        QElement s1{{c(2, 1), unit_vector(c(2, 1))}};
        QElement s2 = s1;
        s2.emplace_back(c(3, 2), unit_vector(c(3, 2)));
        sp->registry().sigma_register(st, s1);
        sp->registry().sigma_register(st, s2);
        sp->admit(age_one(4, 1,
            make_alpha_average({{-1, c(2, 1), {1, 2}}, {1, c(3, 2), {3, 3}}}, 2, 0, 3, AvgKind::CO)));
    }

    // Γ̄-only nodes
    if (Q >= 3)
        sp->admit_bar(age_one(3, 1, make_alpha_average({{1, c(2, 2), {1, 2}}}, 1, 0, 2)));
    if (Q >= 4) {
        NodeId pl = sp->admit_bar(age_one(4, 1,
            make_alpha_average({{1, c(2, 1), {1, 2}}, {1, c(3, 1), {3, 3}}}, 2, 0, 3)));
        if (Q >= 6)
            sp->admit_bar(succ(6, pl, 1, basic_average(st, {{1, c(5, 2)}}, 1, 4, 5)));
    }
    return sp;
}

SpaceStage micro_bmt(std::shared_ptr<const WeightSchedule> ws, Rank Q)
{
    SpaceStage st = make_bmt_stage(std::move(ws), ThresholdPolicy::toy());
    NodeId base = st.register_node(base_node());
    for (Rank r = 2; r <= Q; ++r) {
        Rank q = r - 1;
        auto below = st.indices_up_to(q);
        std::vector<GammaNode> menu;
        for (std::size_t eta : below)
            for (long j = 1; j <= 2; ++j)
                if (j <= r)
                    menu.push_back(age_one(r, j, basic_average(st, {{1, st.id(eta)}}, 1, 0, q)));
        if (q >= 2)
            menu.push_back(age_one(r, 1,
                basic_average(st, {{1, base}, {-1, st.id(st.at_rank(q).front())}}, 2, 0, q)));
        const auto& top = st.at_rank(q);
        for (std::size_t xi : below) {
            const GammaNode& g = st.node(xi);
            if (g.variant == Variant::Base || g.rank > q - 1 || g.j > g.rank)
                continue;
            for (std::size_t k = 0; k < std::min<std::size_t>(2, top.size()); ++k)
                menu.push_back(succ(r, st.id(xi), g.j,
                    basic_average(st, {{1, st.id(top[k])}}, 1, g.rank, q)));
        }
        for (const auto& g : menu)
            st.register_node(g);
    }
    return st;
}

std::vector<SubsetSpec> generated_subsets(const XnrSpace& sp, Rank Q, unsigned seed)
{
    const SpaceStage& st = sp.stage();
    auto idx = st.indices_up_to(Q);
    std::vector<SubsetSpec> out;
    out.push_back(full_subset(st, "full"));
    out.push_back(sp.gamma());

    std::vector<NodeId> succs, seeds;
    for (std::size_t i : idx) {
        const GammaNode& g = st.node(i);
        if (g.variant == Variant::Succ && sp.in_gamma(st.id(i)))
            succs.push_back(st.id(i));
    }
    if (!succs.empty()) {
        seeds.push_back(succs.front());
        seeds.push_back(succs.back());
    }
    for (std::size_t i : idx) {
        const GammaNode& g = st.node(i);
        bool weighted = g.avg.kind == AvgKind::IC || g.avg.kind == AvgKind::CO;
        bool plain = g.variant != Variant::Base && g.avg.kind == AvgKind::Plain;
        if ((weighted || plain || g.avg.entries.size() > 1) && seeds.size() < 4)
            seeds.push_back(st.id(i));
    }
    for (std::size_t i = idx.size(); i-- > 0 && seeds.size() < 4;)
        seeds.push_back(st.id(idx[i]));
    for (std::size_t k = 0; k < seeds.size(); ++k)
        out.push_back(reference_closure(st, {seeds[k]}, "closure" + std::to_string(k + 1)));

    SubsetSpec prefix;
    prefix.tag = "prefix3";
    for (std::size_t i : st.indices_up_to(std::min<Rank>(3, Q)))
        prefix.members.insert(st.id(i));
    out.push_back(prefix);

    SubsetSpec base;
    base.tag = "base";
    base.members.insert(content_id(base_node()));
    out.push_back(base);

    if (!succs.empty()) {
        SubsetSpec neg = reference_closure(st, {succs.front()}, "negative");
        neg.members.erase(st.node(succs.front()).pred);
        out.push_back(neg);
    }

    std::mt19937 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (int k = 1; k <= 3; ++k) {
        SubsetSpec s;
        s.tag = "random" + std::to_string(k);
        for (std::size_t i : idx)
            if (coin(rng))
                s.members.insert(st.id(i));
        out.push_back(s);
    }
    return out;
}

std::unique_ptr<XnrSpace> c0_stage(std::shared_ptr<const WeightSchedule> ws, Rank top)
{
    auto sp = std::make_unique<XnrSpace>(std::move(ws), ThresholdPolicy::toy(), Mode::Toy);
    SpaceStage& st = sp->stage();
    sp->base();
    std::vector<NodeId> diag, one;
    for (Rank r = 2; r <= top; ++r) {
        diag.push_back(sp->canonical(r, static_cast<long>(r)));
        one.push_back(sp->canonical(r, 1));
    }
    auto upto = [&](const std::vector<NodeId>& fam, Rank lo, Rank hi) {
        Terms t;
        for (const auto& id : fam) {
            Rank r = st.rank_of(id);
            if (lo < r && r <= hi)
                t.emplace_back(t.size() % 2 ? -1 : 1, id);
        }
        return t;
    };
    std::map<Rank, std::vector<NodeId>> menu;
    for (Rank R = 3; R <= top + 1; ++R) {
        Rank q = R - 1;
        std::vector<GammaNode> add;
        for (long j = 1; j <= 2; ++j) {
            for (const auto* fam : {&diag, &one}) {
                Terms L = upto(*fam, 0, q);
                for (const auto& t : L)
                    add.push_back(age_one(R, j, basic_average(st, {{1, t.second}}, 1, 0, q)));
                if (L.size() >= 2)
                    add.push_back(age_one(R, j, basic_average(st, L, L.size(), 0, q)));
            }
        }
        for (Rank p = std::max<Rank>(3, q - 2); p <= q - 1; ++p) {
            auto it = menu.find(p);
            if (it == menu.end())
                continue;
            std::size_t used = 0;
            for (const auto& xi : it->second) {
                if (used == 8)
                    break;
                const GammaNode& g = st.node(xi);
                Terms L = upto(diag, p, q);
                if (L.empty() || g.j > p)
                    continue;
                add.push_back(succ(R, xi, g.j, basic_average(st, L, L.size(), p, q)));
                ++used;
            }
        }
        for (auto& g : add)
            menu[R].push_back(sp->admit(g));
    }
    return sp;
}

Report suite_analysis(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("analysis", cfg, *ws);
    auto sp = scripted_xnr(ws, cfg.analysis_Q);
    const SpaceStage& st = sp->stage();
    rep.add(make_check("scripted stage has ≥ 50 nodes", qn(st.size()), Rel::Ge, 50));
    rep.add(make_check("ranks ≤ Q", Rational(st.max_rank()), Rel::Le, Rational(cfg.analysis_Q)));
    Tally exact, windows;
    std::size_t vectors = 0;
    for (std::size_t i : st.indices_up_to(st.max_rank())) {
        if (st.node(i).variant == Variant::Base)
            continue;
        AnalysisCheck ac = verify_evaluation_analysis(st, st.id(i));
        exact.add(ac.exact, st.id(i) + " " + ac.witness);
        windows.add(ac.windows, st.id(i));
        vectors += ac.vectors;
    }
    rep.add(exact.flag("Σd*_ξ + (1/m_j)Σb* − e*_γ vanishes on every d_η, rank η ≤ rank γ"));
    rep.add(windows.flag("analysis windows b*_r ∈ B_{p_{r−1}, p_r − 1}"));
    rep.extra["nodes"] = st.size();
    rep.extra["gamma_nodes"] = sp->gamma().members.size();
    rep.extra["evaluations"] = vectors;
    return rep;
}

Report suite_selfdet(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("selfdet", cfg, *ws);
    auto sp = scripted_xnr(ws, cfg.Q);
    const SpaceStage& st = sp->stage();
    auto subs = generated_subsets(*sp, cfg.Q, cfg.seed);
    rep.add(make_check("generated subsets ≥ 10", qn(subs.size()), Rel::Ge, 10));
    nlohmann::json verdicts = nlohmann::json::object();
    for (const auto& sub : subs) {
        Tally agree;
        SelfDetVerdict last;
        for (Rank q = 1; q <= cfg.Q; ++q) {
            last = check_self_determined(st, sub, q);
            agree.add(last.agree(), "Q=" + std::to_string(q));
        }
        rep.add(agree.flag("(b), (d), (e) agree for " + sub.tag));
        verdicts[sub.tag] = last.to_json();
        if (sub.tag == "Gamma")
            rep.add(make_flag("Γ is self-determined in Γ̄", last.self_determined()));
        if (sub.tag == "negative") {
            bool has = last.witness.has_value();
            rep.add(make_flag("negative case is not self-determined", !last.d));
            rep.add(make_flag("negative case yields a witness pair", has));
            if (has) {
                const auto& [eta, gamma] = *last.witness;
                bool ok = sub.contains(eta) && !sub.contains(gamma) && st.coordinate(eta, gamma) != 0;
                rep.add(make_flag("witness has η ∈ Γ′, γ ∉ Γ′, e*_η(d_γ) ≠ 0", ok,
                    "η=" + eta + " γ=" + gamma));
            }
        }
    }
    rep.extra["verdicts"] = verdicts;
    return rep;
}

Report suite_quotient(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("quotient", cfg, *ws);
    SpaceStage st = micro_bmt(ws, cfg.micro_Q);
    nlohmann::json reports = nlohmann::json::object();
    for (const auto& sub : micro_subsets(st)) {
        Section1Report r = verify_section1_suite(st, sub, cfg.micro_Q, cfg.seed);
        rep.add(make_flag(sub.tag + " self-determined", r.verdict.self_determined()));
        for (const auto& it : r.items)
            rep.add(make_flag(sub.tag + ": " + it.name, it.pass,
                std::to_string(it.checked) + " checked" + (it.witness.empty() ? "" : ", " + it.witness)));
        reports[sub.tag] = r.to_json();
    }
    rep.extra["nodes"] = st.size();
    rep.extra["subsets"] = reports;
    return rep;
}

Report suite_extension(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("extension", cfg, *ws);
    SpaceStage st = micro_bmt(ws, cfg.micro_Q);
    for (Rank q = 1; q <= cfg.micro_Q; ++q) {
        ExtensionReport e = check_extension_bound(st, q, cfg.micro_Q);
        rep.add(make_check("micro row ℓ₁ mass of r∘i_q ≤ 2, q=" + std::to_string(q), e.max_mass,
            Rel::Le, 2, std::to_string(e.rows) + " rows"));
    }
    auto sp = scripted_xnr(ws, cfg.Q);
    for (Rank q = 1; q <= cfg.Q; ++q) {
        ExtensionReport e = check_extension_bound(sp->stage(), q, cfg.Q);
        rep.add(make_check("scripted row ℓ₁ mass of r∘i_q ≤ 2, q=" + std::to_string(q),
            e.max_mass, Rel::Le, 2, std::to_string(e.rows) + " rows"));
    }
    rep.extra["micro_nodes"] = st.size();
    return rep;
}

Report suite_mt(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("mt", cfg, *ws);
    SccReport scc = check_scc_lemma(*ws, 1, 32, 4);
    Rational n1(ws->n(1));
    for (const auto& row : scc.rows) {
        std::string k = " k=" + std::to_string(row.k);
        rep.add(make_check("mt_norm + tail ≤ k/n_1 + 1/m_1" + k, row.norm + row.tail, Rel::Le,
            row.upper));
        rep.add(make_check("admissible functional ≥ k/n_1" + k, row.lower, Rel::Ge,
            Rational(row.k) / n1));
        rep.add(make_check("admissible functional ≤ mt_norm" + k, row.lower, Rel::Le, row.norm));
    }
    rep.extra["scc"] = scc.to_json();
    return rep;
}

Report suite_l1(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("l1", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    NormedBlocks nb = basis_blocks(sp, basis_family(1), 2, 72, 2);
    const SpaceStage& st = sp.stage();
    std::mt19937 rng(cfg.seed);
    std::uniform_int_distribution<long> mag(1, 9), den(1, 7), sgn(0, 1);
    std::vector<long> all(nb.blocks.size());
    for (std::size_t k = 0; k < all.size(); ++k)
        all[k] = static_cast<long>(k);
    nlohmann::json tuples = nlohmann::json::array();
    for (int t = 1; t <= 10; ++t) {
        std::vector<long> picks;
        std::sample(all.begin(), all.end(), std::back_inserter(picks), 6, rng);
        std::vector<Rational> lambda;
        Rational mass = 0;
        nlohmann::json lam = nlohmann::json::array();
        for (std::size_t i = 0; i < picks.size(); ++i) {
            long num = mag(rng) * (sgn(rng) ? -1 : 1);
            lambda.push_back(make_q(num, den(rng)));
            mass += abs_q(lambda.back());
            lam.push_back(to_string(lambda.back()));
        }
        LowerCertificate lc = l1_lower_certificate(sp, nb, picks, lambda, 1);
        std::string at = " tuple " + std::to_string(t);
        Rational want = mass * ws->inv_m(1);
        rep.add(make_check("e*_γ(Σλx) = (1/m_1)Σ|λ|" + at, lc.value, Rel::Eq, want));
        rep.add(make_check("certified bound θ(1/m_1)Σ|λ| attained" + at, lc.value, Rel::Ge,
            lc.bound));
        rep.add(make_check("horizon lower ‖Σλx‖ ≥ (1/m_1)Σ|λ|" + at,
            horizon_norm(st, lc.x).lower, Rel::Ge, want));
        tuples.push_back({{"picks", picks}, {"lambda", lam}, {"gamma", lc.gamma},
            {"value", to_string(lc.value)}});
    }
    L1Average avg = build_l1_average(sp, nb, 0, 8, 8, 1);
    rep.add(make_check("ℓ₁⁸-average lower norm ≥ 1/C, C=8", avg.lower, Rel::Ge, make_q(1, 8)));
    rep.extra["tuples"] = tuples;
    return rep;
}

Report suite_ris(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("ris", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    const SpaceStage& st = sp.stage();
    long count = std::min<long>(8, ws->depth() / 2);
    NormedBlocks nb = basis_blocks(sp, diagonal_family(), 2, count, 2);
    L1Average avg = build_l1_average(sp, nb, 0, 8, 4, 1);
    rep.add(make_check("ℓ₁⁴-average lower norm ≥ 1/C, C=8", avg.lower, Rel::Ge, make_q(1, 8)));
    RISWitness w = build_ris(st, nb.blocks, 2, st.max_rank());
    rep.add(make_check("RIS keeps every source block", qn(w.vectors.size()), Rel::Eq, qn(count)));
    rep.merge(check_ris(st, w, st.max_rank()), "definition");
    rep.merge(verify_ris_estimates(st, sp.gamma(), w, 2), "estimates");
    AlphaProfile prof = alpha_profile(st, w.vectors, standard_pool(st, sp.gamma()));
    rep.extra["alpha_profile"] = prof.csv();
    return rep;
}

Report suite_depseq(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("depseq", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    const SpaceStage& st = sp.stage();
    DependentParams p{cfg.length, cfg.C, cfg.theta, cfg.window_cap, 4};
    DependentSequence ds = build_dependent_sequence(sp, p, {basis_family(1)});
    for (std::size_t k = 0; k < ds.pairs.size(); ++k) {
        const ExactPair& ep = ds.pairs[k];
        rep.add(make_check("e*_γ(x) = θ, pair " + std::to_string(k + 1),
            evaluate(st, e_star(ep.gamma), ep.x), Rel::Eq, ds.theta));
    }

    long L = static_cast<long>(ds.pairs.size());
    for (long n = 1; n <= L; ++n)
        for (long m = n; m <= L; ++m) {
            BlockVector s;
            for (long k = n; k <= m; ++k)
                s += ds.pairs[k - 1].x;
            rep.add(make_check("plain sum Σ_{k=" + std::to_string(n) + ".." + std::to_string(m) +
                    "} x_k, horizon lower ≤ 10C",
                horizon_norm(st, s).lower, Rel::Le, 10 * ds.C));
        }

    Blowup bw = blowup_witness(sp, ds, 1, BlowupPattern::Alternating);
    BlockVector alt;
    for (long k = 1; k <= L; ++k)
        alt += ds.pairs[k - 1].x.scaled(k % 2 ? -1 : 1);
    Rational direct = evaluate(st, e_star(bw.gamma), alt);
    Rational mj(ws->m(1));
    rep.add(make_check("blow-up age a ≥ 4", Rational(bw.a), Rel::Ge, 4));
    rep.add(make_check("e*_γ(Σ(−1)^k x_k) = (a/m_j)θ", direct, Rel::Eq,
        Rational(bw.a) * ds.theta / mj));
    rep.add(make_check("ratio lower(Σ(−1)^k x_k)/10C ≥ aθ/(10C m_j)", direct / (10 * ds.C),
        Rel::Ge, Rational(bw.a) * ds.theta / (10 * ds.C * mj)));
    Blowup sub = blowup_witness(sp, ds, 1, BlowupPattern::Subset, {1, 3});
    rep.add(make_check("subset pattern {1,3}: e*_γ(x_1 + x_3) = (a/m_j)θ",
        evaluate(st, e_star(sub.gamma), ds.pairs[0].x + ds.pairs[2 % L].x), Rel::Eq, sub.expected));
    // after the blow-ups so their CO averages enter the discrepancy check
    rep.merge(verify_dependent_estimates(sp, ds), "estimates");
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& ep : ds.pairs)
        pairs.push_back({{"gamma", ep.gamma}, {"j", ep.j}, {"windows", ep.windows},
            {"ran", to_json(ran(st, ep.x))}});
    rep.extra["pairs"] = pairs;
    rep.extra["blowup"] = {{"gamma", bw.gamma}, {"a", bw.a}, {"value", to_string(bw.value)}};
    rep.extra["nodes"] = st.size();
    return rep;
}

Report suite_hi(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("hi", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    DependentParams p{cfg.length, cfg.C, cfg.theta, cfg.window_cap, 4};
    DependentSequence ds = build_dependent_sequence(sp, p, {basis_family(1), basis_family(2)});
    rep.merge(hi_witness(sp, ds, 1), "interleaved");
    return rep;
}

Report suite_c0sm(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("c0sm", cfg, *ws);
    const Rank top = 7;
    auto sp = c0_stage(ws, top);
    const SpaceStage& st = sp->stage();
    std::vector<NodeId> diag, one;
    for (Rank r = 2; r <= top; ++r) {
        diag.push_back(sp->canonical(r, static_cast<long>(r)));
        one.push_back(sp->canonical(r, 1));
    }
    std::vector<NodeId> basis = ramsey_basis_select(st, diag);
    std::vector<long> js{1};
    for (std::size_t k = 0; k + 1 < basis.size(); ++k)
        js.push_back(static_cast<long>(st.rank_of(basis[k])) + 1);
    C0Result u = c0_estimate(st, basis, js, 8, 4);
    rep.add(make_check("unbounded weights: sets with m_j·value > C=8", qn(u.violations), Rel::Eq, 0,
        u.witness));
    rep.add(make_check("unbounded weights: max m_j·value ≤ 8", u.worst_ratio, Rel::Le, 8,
        std::to_string(u.functionals) + " functionals, " + std::to_string(u.sets) + " sets"));
    rep.add(make_flag("unbounded weights: instances checked", u.sets > 0));

    std::vector<long> open(one.size(), std::numeric_limits<long>::max());
    Rational Cb = 2 + Rational(ws->m(1));
    C0Result b = c0_estimate(st, one, open, Cb, 4);
    rep.add(make_check("bounded weights: sets with m_j·value > C=2+m_1", qn(b.violations), Rel::Eq,
        0, b.witness));
    rep.add(make_check("bounded weights: max m_j·value ≤ 2+m_1", b.worst_ratio, Rel::Le, Cb,
        std::to_string(b.functionals) + " functionals, " + std::to_string(b.sets) + " sets"));
    rep.extra["nodes"] = st.size();
    rep.extra["js"] = js;
    return rep;
}

Report witness_exactpair(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("exactpair", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    ExactPairParams p;
    p.j = 1;
    p.C = cfg.C;
    p.theta = cfg.theta;
    p.window_cap = cfg.window_cap;
    Rank start = std::max<Rank>(2, ws->m(1).get_si());
    NormedBlocks nb = exact_pair_layout(sp, basis_family(1), p, start);
    ExactPair ep = build_exact_pair(sp, p, nb.blocks, nb.normers);
    rep.merge(check_exact_pair(sp.stage(), sp.gamma(), ep), "pair");
    Interval E = rho_interval(sp.stage(), ep, ep.theta / 2);
    rep.extra["gamma"] = ep.gamma;
    rep.extra["x"] = to_json(ep.x);
    rep.extra["rho_half_interval"] = to_json(E);
    return rep;
}

Report witness_blowup(const RunConfig& cfg)
{
    auto ws = cfg.weights();
    Report rep = fresh("blowup", cfg, *ws);
    XnrSpace sp(ws, ThresholdPolicy::toy(), cfg.coding);
    sp.base();
    DependentParams p{cfg.length, cfg.C, cfg.theta, cfg.window_cap, 4};
    DependentSequence ds = build_dependent_sequence(sp, p, {basis_family(1)});
    Blowup bw = blowup_witness(sp, ds, 1, BlowupPattern::Alternating);
    rep.add(make_check("e*_γ(Σ(−1)^k x_k) = (a/m_j)θ", bw.value, Rel::Eq, bw.expected));
    rep.extra["gamma"] = bw.gamma;
    rep.extra["a"] = bw.a;
    return rep;
}

std::vector<std::string> suite_names()
{
    return {"section1", "analysis", "selfdet", "quotient", "extension", "mt", "l1", "ris", "depseq",
        "hi", "c0sm", "all"};
}

Report run_suite(const std::string& name, const RunConfig& cfg)
{
    using Fn = Report (*)(const RunConfig&);
    static const std::vector<std::pair<std::string, std::vector<Fn>>> table{
        {"analysis", {suite_analysis}},
        {"selfdet", {suite_selfdet}},
        {"quotient", {suite_quotient}},
        {"extension", {suite_extension}},
        {"section1", {suite_analysis, suite_selfdet, suite_quotient, suite_extension}},
        {"mt", {suite_mt}},
        {"l1", {suite_l1}},
        {"ris", {suite_l1, suite_ris}},
        {"depseq", {suite_depseq, suite_hi}},
        {"hi", {suite_hi}},
        {"c0sm", {suite_c0sm}},
        {"all", {suite_analysis, suite_selfdet, suite_quotient, suite_extension, suite_mt, suite_l1,
                    suite_ris, suite_depseq, suite_hi, suite_c0sm}},
    };
    for (const auto& [n, fns] : table) {
        if (n != name)
            continue;
        auto ws = cfg.weights();
        Report rep = fresh(name, cfg, *ws);
        for (Fn f : fns) {
            Report r = f(cfg);
            rep.merge(r, r.suite);
        }
        return rep;
    }
    throw std::invalid_argument("unknown suite: " + name);
}

}
