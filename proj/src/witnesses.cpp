#include "bdlab/witnesses.hpp"
#include "bdlab/mixed_tsirelson.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bdlab {

namespace {

Rational q_of(std::size_t n) { return Rational(BigInt(static_cast<unsigned long>(n))); }

long as_long(const BigInt& v, const char* what)
{
    if (!v.fits_slong_p())
        throw std::overflow_error(std::string(what) + " exceeds the long range");
    return v.get_si();
}

BigInt ceil_q(const Rational& x)
{
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Rational sup_E(const SpaceStage& st, const NodeId& g, const BlockVector& x)
{
    if (x.zero())
        return 0;
    return sup_over_intervals(st, st.index_of(g), dense(st, x));
}

Rational lower_norm(const SpaceStage& st, const BlockVector& x)
{
    return horizon_norm(st, x).lower;
}

// keeps the check with the smallest margin
struct Worst {
    bool any = false;
    Check c;
    std::size_t count = 0;
    void offer(Check k)
    {
        ++count;
        if (!any || (c.pass && !k.pass) || (c.pass == k.pass && k.margin() < c.margin())) {
            c = std::move(k);
            any = true;
        }
    }
    void flush(Report& rep, const std::string& claim, const std::string& vacuous)
    {
        if (!any) {
            rep.add(make_flag(claim, true, vacuous));
            return;
        }
        c.claim = claim;
        c.note = (c.note.empty() ? "" : c.note + "; ") + std::to_string(count) + " instances";
        rep.add(c);
    }
};

AlphaAverage average_over(const SpaceStage& st, std::vector<AverageEntry> es, const BigInt& n)
{
    bool basic = std::all_of(es.begin(), es.end(),
        [&](const AverageEntry& e) { return e.E == Interval::point(st.rank_of(e.node)); });
    AlphaAverage a;
    a.size = n;
    a.entries = std::move(es);
    a.kind = basic ? AvgKind::Basic : AvgKind::Plain;
    return a;
}

}

std::vector<std::vector<long>> schreier1_partition(long start, long count, long cap)
{
    if (start < 1)
        throw std::invalid_argument("𝒮₁ partition needs start ≥ 1");
    std::vector<std::vector<long>> out;
    long next = start;
    for (long r = 0; r < count; ++r) {
        long size = cap > 0 ? std::min(next, cap) : next;
        std::vector<long> F;
        for (long i = 0; i < size; ++i)
            F.push_back(next + i);
        next += size;
        out.push_back(std::move(F));
    }
    return out;
}

SourceFamily basis_family(long weight_index)
{
    SourceFamily f;
    f.name = "basis(j=" + std::to_string(weight_index) + ")";
    f.make = [weight_index](XnrSpace& sp, Rank r) {
        NodeId eta = sp.canonical(r, weight_index);
        return std::make_pair(unit_vector(eta), eta);
    };
    return f;
}

NormedBlocks basis_blocks(XnrSpace& sp, const SourceFamily& fam, Rank start, long count,
    Rank stride)
{
    if (stride < 2)
        throw std::invalid_argument("stride must leave a free rank after each block");
    NormedBlocks nb;
    for (long k = 0; k < count; ++k) {
        auto [x, eta] = fam.make(sp, start + k * stride);
        nb.blocks.push_back(std::move(x));
        nb.normers.push_back(std::move(eta));
    }
    return nb;
}

void assign_windows(const SpaceStage& st, std::vector<AlphaAverage>& seq, Rank p0)
{
    Rank p = p0;
    for (std::size_t r = 0; r < seq.size(); ++r) {
        auto& b = seq[r];
        Interval R = average_range(b);
        if (R.empty())
            throw std::invalid_argument("empty average at r=" + std::to_string(r + 1));
        Rank q = R.hi;
        for (const auto& e : b.entries) {
            Rank er = st.rank_of(e.node);
            if (er <= p || e.E.lo <= p)
                throw std::invalid_argument("support collision at r=" + std::to_string(r + 1) +
                    ": entry reaches rank ≤ p=" + std::to_string(p));
            q = std::max(q, er);
        }
        b = make_alpha_average(b.entries, b.size, p, q, b.kind);
        p = q + 1;
    }
}

LowerCertificate l1_lower_certificate(XnrSpace& sp, const NormedBlocks& fam,
    const std::vector<long>& picks, const std::vector<Rational>& lambda, long j)
{
    const SpaceStage& st = sp.stage();
    if (picks.empty() || picks.size() != lambda.size())
        throw std::invalid_argument("picks and coefficients must be nonempty and of equal length");
    std::vector<AlphaAverage> vfg;
    BlockVector x;
    Rational theta = -1;
    for (std::size_t i = 0; i < picks.size(); ++i) {
        long k = picks[i];
        if (k < 0 || static_cast<std::size_t>(k) >= fam.blocks.size())
            throw std::out_of_range("pick outside the family");
        if (i > 0 && k <= picks[i - 1])
            throw std::invalid_argument("picks must increase");
        const BlockVector& xk = fam.blocks[k];
        const NodeId& eta = fam.normers[k];
        Interval E = ran(st, xk);
        Rational t = evaluate_atom(st, eta, E, xk);
        if (t <= 0)
            throw std::invalid_argument("normer does not evaluate positively on its block");
        theta = theta < 0 ? t : std::min(theta, t);
        int s = lambda[i] < 0 ? -1 : 1;
        vfg.push_back(average_over(st, {{s, eta, E}}, 1));
        x += xk.scaled(lambda[i]);
    }
    assign_windows(st, vfg, 0);
    for (const auto& b : vfg)
        for (const auto& [id, c] : x.coeffs)
            if (st.rank_of(id) == b.q + 1)
                throw std::invalid_argument("support collision: block meets ξ rank " +
                    std::to_string(b.q + 1));
    LowerCertificate lc;
    lc.gamma = build_gamma_from_vfg(sp, j, vfg);
    lc.x = x;
    lc.value = evaluate(st, e_star(lc.gamma), x);
    Rational mass = 0;
    for (const auto& l : lambda)
        mass += abs_q(l);
    lc.bound = theta * st.schedule().inv_m(j) * mass;
    return lc;
}

L1Average build_l1_average(XnrSpace& sp, const NormedBlocks& fam, long first, const Rational& C,
    long n, long j)
{
    if (n < 1 || first < 0 || static_cast<std::size_t>(first + n) > fam.blocks.size())
        throw std::invalid_argument("not enough source blocks for an ℓ₁ⁿ-average");
    const SpaceStage& st = sp.stage();
    L1Average out;
    std::vector<long> picks;
    std::vector<Rational> lambda;
    for (long k = first; k < first + n; ++k) {
        Rational L = lower_norm(st, fam.blocks[k]);
        if (L == 0)
            throw std::invalid_argument("zero source block");
        BlockVector yk = fam.blocks[k].scaled(1 / L);
        out.blocks.push_back(yk);
        out.y += yk.scaled(make_q(1, n));
        picks.push_back(k);
        lambda.push_back(1 / (L * n));
    }
    LowerCertificate lc = l1_lower_certificate(sp, fam, picks, lambda, j);
    out.witness = lc.gamma;
    out.certified = lc.value;
    out.lower = lower_norm(st, out.y);
    if (out.lower < 1 / C)
        throw std::runtime_error("certificate insufficient: lower norm " + to_string(out.lower) +
            " < 1/C");
    out.scale = 1 / out.lower;
    return out;
}

std::vector<long> AlphaProfile::zero_from(const Rational& eps) const
{
    std::vector<long> out;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        long k0 = static_cast<long>(table.size());
        for (long k = static_cast<long>(table.size()) - 1; k >= 0; --k) {
            if (!(table[k][s] < eps))
                break;
            k0 = k;
        }
        out.push_back(k0 == static_cast<long>(table.size()) ? -1 : k0);
    }
    return out;
}

std::string AlphaProfile::csv() const
{
    std::ostringstream os;
    os << "k";
    for (const auto& s : sizes)
        os << ",s>=" << s.get_str();
    os << '\n';
    for (std::size_t k = 0; k < table.size(); ++k) {
        os << k + 1;
        for (const auto& v : table[k])
            os << ',' << to_string(v);
        os << '\n';
    }
    return os.str();
}

Rational sup_average_over_intervals(const SpaceStage& st, const AlphaAverage& b,
    const BlockVector& x)
{
    std::map<Rank, Rational> by_rank;
    Rational inv = make_q(BigInt(1), b.size);
    for (const auto& e : b.entries) {
        std::size_t g = st.index_of(e.node);
        for (const auto& [id, c] : x.coeffs) {
            std::size_t xi = st.index_of(id);
            Rank r = st.rank(xi);
            if (!e.E.contains(r))
                continue;
            Rational v = st.coordinate(g, xi);
            if (v != 0)
                by_rank[r] += inv * e.sign * c * v;
        }
    }
    Rational run = 0, lo = 0, hi = 0;
    for (const auto& kv : by_rank) {
        run += kv.second;
        lo = std::min(lo, run);
        hi = std::max(hi, run);
    }
    return hi - lo;
}

AlphaProfile alpha_profile(const SpaceStage& st, const std::vector<BlockVector>& xs,
    const std::vector<AlphaAverage>& pool)
{
    if (pool.empty())
        throw std::invalid_argument("empty average pool");
    AlphaProfile prof;
    for (const auto& b : pool)
        prof.sizes.push_back(b.size);
    std::sort(prof.sizes.begin(), prof.sizes.end());
    prof.sizes.erase(std::unique(prof.sizes.begin(), prof.sizes.end()), prof.sizes.end());
    for (const auto& x : xs) {
        std::vector<Rational> row(prof.sizes.size(), Rational(0));
        for (const auto& b : pool) {
            Rational v = sup_average_over_intervals(st, b, x);
            for (std::size_t s = 0; s < prof.sizes.size(); ++s)
                if (b.size >= prof.sizes[s])
                    row[s] = std::max(row[s], v);
        }
        prof.table.push_back(std::move(row));
    }
    return prof;
}

std::vector<AlphaAverage> standard_pool(const SpaceStage& st, const SubsetSpec& gamma,
    const BigInt& min_size)
{
    std::vector<AlphaAverage> pool;
    std::set<std::string> seen;
    for (std::size_t i : st.indices_up_to(st.max_rank())) {
        const NodeId& id = st.id(i);
        if (!gamma.contains(id))
            continue;
        const GammaNode& g = st.node(i);
        if (g.variant == Variant::Base || g.avg.kind == AvgKind::Plain || g.avg.size < min_size)
            continue;
        if (seen.insert(to_json(g.avg).dump()).second)
            pool.push_back(g.avg);
    }
    return pool;
}

RISWitness build_ris(const SpaceStage& st, const std::vector<BlockVector>& source,
    const Rational& C, Rank Q)
{
    RISWitness w;
    w.C = C;
    auto gammas = st.indices_up_to(Q);
    Rank prev_max = 0;
    for (const auto& x : source) {
        if (x.zero())
            continue;
        Interval R = ran(st, x);
        if (R.hi > Q || R.lo <= prev_max)
            continue;
        if (horizon_norm(st, x, Q).upper > C)
            continue;
        long jk = w.vectors.empty() ? 1 : static_cast<long>(prev_max) + 1;
        bool ok = true;
        for (std::size_t g : gammas) {
            const GammaNode& node = st.node(g);
            if (node.variant == Variant::Base || node.j >= jk)
                continue;
            if (!(abs_q(evaluate_atom(st, st.id(g), Interval::all(), x)) <
                    C * st.schedule().inv_m(node.j))) {
                ok = false;
                break;
            }
        }
        if (!ok)
            continue;
        w.vectors.push_back(x);
        w.j.push_back(jk);
        prev_max = R.hi;
    }
    return w;
}

Report check_ris(const SpaceStage& st, const RISWitness& w, Rank Q)
{
    Report rep;
    rep.suite = "ris-definition";
    if (w.vectors.size() != w.j.size())
        throw std::invalid_argument("RIS index sequence length differs from the vectors");
    Worst norm, growth, small;
    Rank prev_max = 0;
    bool covered = true;
    for (std::size_t k = 0; k < w.vectors.size(); ++k) {
        const auto& x = w.vectors[k];
        std::string at = "k=" + std::to_string(k + 1);
        Interval R = ran(st, x);
        if (R.hi > Q) {
            covered = false;
            rep.add(make_flag("coverage of x_" + std::to_string(k + 1), false,
                "support exceeds horizon Q=" + std::to_string(Q)));
            continue;
        }
        norm.offer(make_check("", horizon_norm(st, x, Q).upper, Rel::Le, w.C, at));
        if (k > 0) {
            growth.offer(make_check("", Rational(w.j[k]), Rel::Gt, Rational(prev_max), at));
            if (w.j[k] <= w.j[k - 1])
                rep.add(make_flag("j strictly increasing", false, at));
        }
        if (R.lo <= prev_max)
            rep.add(make_flag("blocks successive", false, at));
        prev_max = R.hi;
        for (std::size_t g : st.indices_up_to(Q)) {
            const GammaNode& node = st.node(g);
            if (node.variant == Variant::Base || node.j >= w.j[k])
                continue;
            Rational v = abs_q(evaluate_atom(st, st.id(g), Interval::all(), x));
            small.offer(make_check("", v, Rel::Lt, w.C * st.schedule().inv_m(node.j),
                at + " γ=" + st.id(g)));
        }
    }
    norm.flush(rep, "(i) ‖x_k‖ ≤ C (horizon upper)", "no vectors");
    growth.flush(rep, "(ii) j_{k+1} > max supp x_k", "single vector");
    small.flush(rep, "(iii) |e*_γ(x_k)| < C/m_j for j < j_k", "no γ of small weight registered");
    rep.extra["length"] = w.vectors.size();
    rep.extra["covered"] = covered;
    return rep;
}

Report verify_ris_estimates(const SpaceStage& st, const SubsetSpec& gamma, const RISWitness& w,
    long j, const std::vector<AlphaAverage>& submitted)
{
    const WeightSchedule& ws = st.schedule();
    Report rep;
    rep.suite = "ris-estimates";
    BigInt nj = ws.n(j);
    std::size_t use = w.vectors.size();
    if (BigInt(static_cast<unsigned long>(use)) > nj)
        use = static_cast<std::size_t>(as_long(nj, "n_j"));
    rep.extra["terms"] = use;
    rep.extra["n_j"] = nj.get_str();
    if (BigInt(static_cast<unsigned long>(use)) < nj)
        rep.extra["caveat"] = "fewer than n_j terms available; sums use all terms";
    if (use == 0) {
        rep.add(make_flag("nonempty RIS", false));
        return rep;
    }
    Rational mj(ws.m(j));
    Rational scale = mj / Rational(nj);
    BlockVector x;
    for (std::size_t k = 0; k < use; ++k)
        x += w.vectors[k];
    x = x.scaled(scale);
    const Rational& C = w.C;

    rep.add(make_check("‖(m_j/n_j)Σx_k‖ ≤ 10C", lower_norm(st, x), Rel::Le, 10 * C));

    Worst below, above;
    for (std::size_t g : st.indices_up_to(st.max_rank())) {
        const GammaNode& node = st.node(g);
        if (node.variant == Variant::Base || !gamma.contains(st.id(g)))
            continue;
        long i = node.j;
        Rational v = sup_E(st, st.id(g), x);
        Rational mi(ws.m(i));
        if (i < j)
            below.offer(make_check("", v, Rel::Le, 112 * C / mi, "γ=" + st.id(g)));
        else
            above.offer(make_check("", v, Rel::Le,
                16 * C * mj / Rational(nj) + 24 * C * mj / mi + 80 * C / mi, "γ=" + st.id(g)));
    }
    below.flush(rep, "|e*_γ∘P_E(x)| ≤ 112C/m_i (i<j)", "no γ with i < j");
    above.flush(rep, "|e*_γ∘P_E(x)| ≤ 16Cm_j/n_j + 24Cm_j/m_i + 80C/m_i (i≥j)", "no γ with i ≥ j");

    // mt domination on two coefficient patterns
    for (int pattern = 0; pattern < 2; ++pattern) {
        std::size_t L = std::min(use, kMtMaxLength);
        AuxVector lam;
        BlockVector s;
        for (std::size_t k = 0; k < L; ++k) {
            Rational l = pattern == 0 ? scale : Rational(k % 2 ? -1 : 1) * make_q(1, 1 + k % 3);
            lam.push_back(l);
            s += w.vectors[k].scaled(l);
        }
        MtNorm t = mt_norm(ws, 3, lam, std::max<long>(j + 2, 3));
        rep.add(make_check(std::string("‖Σλx_k‖ ≤ 10C‖Σλe_k‖_T (") +
                (pattern == 0 ? "flat" : "alternating") + ")",
            lower_norm(st, s), Rel::Le, 10 * C * t.value,
            "T-norm value is a lower bound of the full norm"));
    }

    std::vector<AlphaAverage> pool = submitted.empty() ? standard_pool(st, gamma) : submitted;
    Worst single;
    for (const auto& b : pool) {
        Interval R = average_range(b);
        long K = 0;
        for (std::size_t k = 0; k < use; ++k) {
            Interval rk = ran(st, w.vectors[k]);
            if (!rk.intersect(R).empty())
                ++K;
        }
        Rational s(b.size);
        Rational ck = C * K / Rational(nj);
        Rational bound = std::min(Rational(mj * ck / s), Rational(10 * ck / s + 10 * C / mj)) +
            8 * C * mj / Rational(nj);
        single.offer(make_check("", abs_q(evaluate(st, b, x)), Rel::Lt, bound,
            "K=" + std::to_string(K)));
    }
    single.flush(rep, "|b*(x)| < min{m_jCK/n_j/s, 10CK/n_j/s + 10C/m_j} + 8Cm_j/n_j",
        "no averages submitted");

    // vfg families: evaluation analyses of Γ nodes of weight i < j and age ≤ n_i
    Worst part, whole;
    Rank lo = min_supp(st, x);
    for (std::size_t g : st.indices_up_to(st.max_rank())) {
        const GammaNode& node = st.node(g);
        if (node.variant == Variant::Base || !gamma.contains(st.id(g)) || node.j >= j)
            continue;
        long i = node.j;
        if (BigInt(st.age(g)) > ws.n(i))
            continue;
        EvaluationAnalysis ea = evaluation_analysis(st, st.id(g));
        Rational mi(ws.m(i));
        Rational sum = 0;
        bool single_block = true;
        for (const auto& step : ea.steps) {
            sum += abs_q(evaluate(st, step.b, x));
            Interval R = average_range(step.b);
            int meets = 0;
            for (std::size_t k = 0; k < use; ++k)
                if (!ran(st, w.vectors[k]).intersect(R).empty())
                    ++meets;
            if (meets > 1)
                single_block = false;
        }
        if (single_block && lo >= j - 1)
            part.offer(make_check("", sum, Rel::Lt, 24 * C * mi / mj, "γ=" + st.id(g)));
        if (lo >= Rank(as_long(BigInt(mj.get_num() * nj), "m_j n_j")))
            whole.offer(make_check("", sum, Rel::Lt,
                10 * C / Rational(ea.steps.front().b.size) + 50 * C * mi / mj, "γ=" + st.id(g)));
    }
    part.flush(rep, "Σ|b_r*(x)| < 24Cm_i/m_j", "no admissible vfg family (needs i < j)");
    whole.flush(rep, "Σ|b_r*(x)| < 10C/s(b_1*) + 50Cm_i/m_j", "no admissible vfg family (needs i < j, min supp ≥ m_j n_j)");
    return rep;
}

long exact_pair_windows(const WeightSchedule& ws, const ExactPairParams& p)
{
    BigInt nj = ws.n(p.j);
    BigInt lo = ceil_q(p.theta * Rational(nj) / p.C);
    if (lo < 1)
        lo = 1;
    BigInt N;
    if (p.windows > 0)
        N = p.windows;
    else
        N = std::max(lo, std::min(nj, BigInt(p.window_cap)));
    if (N < lo || N > nj)
        throw std::invalid_argument("window count " + N.get_str() + " outside [" + lo.get_str() +
            ", " + nj.get_str() + "]");
    return as_long(N, "window count");
}

NormedBlocks exact_pair_layout(XnrSpace& sp, const SourceFamily& fam, const ExactPairParams& p,
    Rank start)
{
    long N = exact_pair_windows(sp.stage().schedule(), p);
    auto groups = schreier1_partition(p.start_index, N, p.group_cap);
    NormedBlocks nb;
    Rank r = start;
    for (const auto& F : groups) {
        for (std::size_t i = 0; i < F.size(); ++i) {
            auto [x, eta] = fam.make(sp, r++);
            nb.blocks.push_back(std::move(x));
            nb.normers.push_back(std::move(eta));
        }
        ++r;
    }
    return nb;
}

ExactPair build_exact_pair(XnrSpace& sp, const ExactPairParams& p,
    const std::vector<BlockVector>& sources, const std::vector<NodeId>& normers)
{
    const SpaceStage& st = sp.stage();
    const WeightSchedule& ws = st.schedule();
    if (sources.size() != normers.size())
        throw std::invalid_argument("one normer per source block");
    long N = exact_pair_windows(ws, p);
    auto groups = schreier1_partition(p.start_index, N, p.group_cap);
    std::size_t need = 0;
    for (const auto& F : groups)
        need += F.size();
    if (sources.size() < need)
        throw std::invalid_argument("insufficient source length: " + std::to_string(sources.size()) +
            " blocks for " + std::to_string(N) + " groups needing " + std::to_string(need));

    ExactPair ep;
    ep.C = p.C;
    ep.theta = p.theta;
    ep.j = p.j;
    ep.windows = N;
    ep.groups = groups;
    std::vector<AlphaAverage> vfg;
    BlockVector y;
    Rational coef = Rational(ws.m(p.j)) / N * p.theta;
    std::size_t at = 0;
    for (const auto& F : groups) {
        std::vector<AverageEntry> es;
        for (std::size_t t = 0; t < F.size(); ++t, ++at) {
            const BlockVector& x = sources[at];
            Interval E = ran(st, x);
            Rational v = evaluate_atom(st, normers[at], E, x);
            Rational L = lower_norm(st, x);
            if (!(v > make_q(3, 4) * L))
                throw std::invalid_argument("normer threshold e*_η(x) > (3/4)‖x‖ fails at block " +
                    std::to_string(at + 1));
            Rational lambda = 1 / v;
            int eps = t % 2 ? -1 : 1;
            ep.lambda.push_back(lambda);
            es.push_back({eps, normers[at], E});
            y += x.scaled(coef * lambda * eps);
        }
        vfg.push_back(average_over(st, std::move(es), BigInt(static_cast<unsigned long>(F.size()))));
    }
    assign_windows(st, vfg, 0);
    for (const auto& b : vfg)
        for (const auto& kv : y.coeffs)
            if (st.rank_of(kv.first) == b.q + 1)
                throw std::invalid_argument("support collision: block meets ξ rank " +
                    std::to_string(b.q + 1));
    ep.gamma = build_gamma_from_vfg(sp, p.j, vfg);
    ep.x = y;
    Rational got = evaluate(st, e_star(ep.gamma), y);
    if (got != p.theta)
        throw std::logic_error("exact pair identity fails: e*_γ(x) = " + to_string(got));
    return ep;
}

Report check_exact_pair(const SpaceStage& st, const SubsetSpec& gamma, const ExactPair& ep)
{
    const WeightSchedule& ws = st.schedule();
    Report rep;
    rep.suite = "exact-pair";
    const Rational& C = ep.C;
    long j = ep.j;
    Rational mj(ws.m(j));
    Rational nj(ws.n(j));
    rep.add(make_check("e*_γ(x) = θ", evaluate(st, e_star(ep.gamma), ep.x), Rel::Eq, ep.theta));
    rep.add(make_flag("we(γ) = m_j⁻¹", st.node(ep.gamma).j == j));

    Rational supd = 0;
    for (const auto& [id, c] : ep.x.coeffs)
        supd = std::max(supd, abs_q(evaluate(st, d_star(st, id), ep.x)));
    rep.add(make_check("(i) sup|d*_η(x)| ≤ Cm_j/n_j", supd, Rel::Le, C * mj / nj));
    rep.add(make_check("(ii) ‖x‖ ≤ C", lower_norm(st, ep.x), Rel::Le, C));

    Worst big, small;
    for (std::size_t g : st.indices_up_to(st.max_rank())) {
        const GammaNode& node = st.node(g);
        const NodeId& id = st.id(g);
        if (node.variant == Variant::Base || !gamma.contains(id))
            continue;
        long i = node.j;
        if (i > j) {
            big.offer(make_check("", sup_E(st, id, ep.x), Rel::Lt, C / mj, "η=" + id));
        } else if (i < j && BigInt(st.age(g)) <= ws.n(i)) {
            EvaluationAnalysis ea = evaluation_analysis(st, id);
            Rational sum = 0;
            for (const auto& step : ea.steps)
                sum += abs_q(evaluate(st, step.b, ep.x));
            Rational bound = C / Rational(ea.steps.front().b.size) + C * Rational(ws.m(i)) / mj;
            small.offer(make_check("", sum, Rel::Lt, bound, "η=" + id));
        }
    }
    big.flush(rep, "(iii) |e*_η∘P_E(x)| < C/m_j for i > j", "no η with i > j");
    small.flush(rep, "(iv) Σ|b_r*(x)| < C/s(b_1*) + Cm_i/m_j for i < j", "no η with i < j");
    rep.add(make_check("(v) min supp x ≥ m_j", Rational(min_supp(st, ep.x)), Rel::Ge, mj));
    rep.extra["windows"] = ep.windows;
    rep.extra["j"] = j;
    return rep;
}

Interval rho_interval(const SpaceStage& st, const ExactPair& ep, const Rational& rho)
{
    if (rho < 0 || rho > ep.theta)
        throw std::invalid_argument("ρ must lie in [0, θ]");
    const WeightSchedule& ws = st.schedule();
    Rational tol = 2 * ep.C * Rational(ws.m(ep.j)) / Rational(ws.n(ep.j));
    Interval R = ran(st, ep.x);
    std::set<Rank> ranks;
    for (const auto& kv : ep.x.coeffs)
        ranks.insert(st.rank_of(kv.first));
    Interval best{R.lo, R.lo - 1};
    Rational best_gap = abs_q(rho);
    for (Rank t : ranks) {
        Interval E{R.lo, t};
        Rational gap = abs_q(evaluate_atom(st, ep.gamma, E, ep.x) - rho);
        if (gap < best_gap) {
            best_gap = gap;
            best = E;
        }
    }
    if (!(best_gap < tol))
        throw std::runtime_error("no interval within 2Cm_j/n_j of ρ");
    return best;
}

DependentSequence build_dependent_sequence(XnrSpace& sp, const DependentParams& p,
    const std::vector<SourceFamily>& families)
{
    if (p.length < 1 || families.empty())
        throw std::invalid_argument("need ℓ ≥ 1 and at least one source family");
    const SpaceStage& st = sp.stage();
    const WeightSchedule& ws = st.schedule();
    DependentSequence ds;
    ds.C = p.C;
    ds.theta = p.theta;
    QElement prefix;
    long index = 1;
    for (long k = 0; k < p.length; ++k) {
        long j = k == 0 ? 1 : sp.registry().weight_after(st, prefix);
        if (sp.registry().mode() == Mode::Strict && j > ws.depth())
            throw std::invalid_argument("σ-weight " + std::to_string(j) +
                " is infeasible under strict coding; use toy coding");
        ExactPairParams pp;
        pp.j = j;
        pp.C = p.C;
        pp.theta = p.theta;
        pp.window_cap = p.window_cap;
        pp.group_cap = p.group_cap;
        pp.start_index = index;
        BigInt mj = ws.m(j);
        Rank start = std::max<Rank>(as_long(mj, "m_j"), 2);
        if (k > 0)
            start = std::max(start, st.rank_of(ds.pairs.back().gamma) + 2);
        const SourceFamily& fam = families[k % families.size()];
        NormedBlocks nb = exact_pair_layout(sp, fam, pp, start);
        ExactPair ep = build_exact_pair(sp, pp, nb.blocks, nb.normers);
        for (const auto& F : ep.groups)
            index += static_cast<long>(F.size());
        prefix.emplace_back(ep.gamma, ep.x);
        ds.pairs.push_back(std::move(ep));
    }
    ds.special = sp.registry().sigma_register(st, prefix);
    return ds;
}

namespace {

BlockVector partial_sum(const DependentSequence& ds, std::size_t n, std::size_t m)
{
    BlockVector s;
    for (std::size_t k = n; k <= m; ++k)
        s += ds.pairs[k - 1].x;
    return s;
}

}

Report verify_dependent_estimates(XnrSpace& sp, const DependentSequence& ds)
{
    const SpaceStage& st = sp.stage();
    const WeightSchedule& ws = st.schedule();
    Report rep;
    rep.suite = "dependent-estimates";
    const Rational& C = ds.C;
    std::size_t L = ds.pairs.size();
    SubsetSpec gamma = sp.gamma();

    QElement full;
    for (const auto& ep : ds.pairs)
        full.emplace_back(ep.gamma, ep.x);
    rep.add(make_flag("special sequence registered", sp.registry().is_special(st, full)));
    Rank spacing_ok = 1;
    for (std::size_t k = 1; k < L; ++k) {
        Rank top = 0;
        for (std::size_t i = 0; i < k; ++i)
            top = std::max(top, st.rank_of(ds.pairs[i].gamma));
        top = std::max(top, max_supp(st, ds.pairs[k - 1].x));
        if (!(min_supp(st, ds.pairs[k].x) > top))
            spacing_ok = 0;
    }
    rep.add(make_flag("min supp x_{k+1} > max{rank γ_i, max supp x_k}", spacing_ok == 1));

    PairList pl;
    for (std::size_t k = 0; k < L; ++k) {
        pl.pairs.emplace_back(ds.pairs[k].gamma, ran(st, ds.pairs[k].x));
        pl.signs.push_back(k % 2 ? 1 : -1);
    }
    pl.n = BigInt(static_cast<unsigned long>(L));
    Classification cls = classify_pairs(st, sp.registry(), pl);
    rep.add(make_flag("(γ_k, ran x_k) comparable", cls.co,
        cls.co ? "certificate σ=" + cls.co_cert.sequence.get_str() : ""));

    Worst sums, single, filtered, lemma;
    for (std::size_t n = 1; n <= L; ++n)
        for (std::size_t m = n; m <= L; ++m) {
            std::string at = "[" + std::to_string(n) + "," + std::to_string(m) + "]";
            BlockVector s = partial_sum(ds, n, m);
            Rational v = lower_norm(st, s);
            sums.offer(make_check("", v, Rel::Le, 10 * C, at));
            if (n == m)
                single.offer(make_check("", v, Rel::Le, C, at));
        }
    sums.flush(rep, "‖Σ_{k=n}^m x_k‖ ≤ 10C", "empty sequence");
    single.flush(rep, "‖x_n‖ ≤ C", "empty sequence");

    std::vector<long> js;
    for (const auto& ep : ds.pairs)
        js.push_back(ep.j);
    for (std::size_t g : st.indices_up_to(st.max_rank())) {
        const GammaNode& node = st.node(g);
        if (node.variant == Variant::Base || !gamma.contains(st.id(g)))
            continue;
        Rational bound = 63 * C * ws.inv_m(node.j);
        for (std::size_t n = 1; n <= L; ++n)
            for (std::size_t m = n; m <= L; ++m) {
                BlockVector s;
                for (std::size_t k = n; k <= m; ++k)
                    if (js[k - 1] > node.j)
                        s += ds.pairs[k - 1].x;
                if (s.zero())
                    continue;
                filtered.offer(make_check("", sup_E(st, st.id(g), s), Rel::Le, bound,
                    "γ=" + st.id(g)));
            }
    }
    filtered.flush(rep, "|e*_γ∘P_E(Σ_{k∈D} x_k)| ≤ 63C we(γ)", "no weight-filtered sums");

    for (const auto& b : standard_pool(st, gamma)) {
        if (b.kind == AvgKind::Basic)
            continue;
        std::size_t d = b.entries.size();
        for (std::size_t n = 1; n <= L; ++n)
            for (std::size_t m = n; m <= L; ++m) {
                BlockVector s = partial_sum(ds, n, m);
                Rational full_v = 0, filt = 0;
                for (const auto& e : b.entries) {
                    full_v += e.sign * evaluate_atom(st, e.node, e.E, s);
                    long je = st.node(e.node).j;
                    BlockVector sd;
                    for (std::size_t k = n; k <= m; ++k)
                        if (js[k - 1] > je)
                            sd += ds.pairs[k - 1].x;
                    filt += e.sign * evaluate_atom(st, e.node, e.E, sd);
                }
                Rational bound = 9 * C + 2 * q_of(d) * C * ws.inv_m(js[n - 1]);
                lemma.offer(make_check("", abs_q(full_v - filt), Rel::Le, bound,
                    to_string(b.kind) + " d=" + std::to_string(d)));
            }
    }
    lemma.flush(rep, "|Σε e*∘P_E(Σx_k) − Σε e*∘P_E(Σ_{D_j}x_k)| ≤ 9C + 2dC we(γ_n)",
        "no IC/CO/IR families registered");
    rep.extra["length"] = L;
    rep.extra["weights"] = js;
    rep.extra["sigma"] = ds.special.get_str();
    return rep;
}

Blowup blowup_witness(XnrSpace& sp, const DependentSequence& ds, long j, BlowupPattern pattern,
    const std::vector<long>& subset, long upto, long window)
{
    const SpaceStage& st = sp.stage();
    long L = static_cast<long>(ds.pairs.size());
    if (upto <= 0 || upto > L)
        upto = L;
    if (window < 1)
        throw std::invalid_argument("window must be ≥ 1");
    std::vector<std::pair<long, int>> terms;
    if (pattern == BlowupPattern::Alternating) {
        for (long k = 1; k <= upto; ++k)
            terms.emplace_back(k, k % 2 ? -1 : 1);
    } else {
        std::vector<long> s = subset;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (long k : s)
            if (k >= 1 && k <= upto)
                terms.emplace_back(k, 1);
    }
    if (terms.empty())
        throw std::invalid_argument("no terms selected");
    Blowup bw;
    std::vector<AlphaAverage> vfg;
    for (std::size_t at = 0; at < terms.size(); at += static_cast<std::size_t>(window)) {
        std::vector<AverageEntry> es;
        for (std::size_t t = at; t < std::min(terms.size(), at + static_cast<std::size_t>(window)); ++t) {
            const ExactPair& ep = ds.pairs[terms[t].first - 1];
            es.push_back({terms[t].second, ep.gamma, ran(st, ep.x)});
        }
        AlphaAverage a;
        a.size = BigInt(static_cast<unsigned long>(es.size()));
        a.entries = std::move(es);
        a.kind = AvgKind::CO;
        vfg.push_back(std::move(a));
    }
    for (const auto& [k, s] : terms)
        bw.sum += ds.pairs[k - 1].x.scaled(s);
    assign_windows(st, vfg, 0);
    for (const auto& b : vfg)
        for (const auto& ep : ds.pairs)
            for (const auto& kv : ep.x.coeffs)
                if (st.rank_of(kv.first) == b.q + 1)
                    throw std::invalid_argument("support collision: x meets ξ rank " +
                        std::to_string(b.q + 1));
    bw.a = static_cast<long>(vfg.size());
    bw.gamma = build_gamma_from_vfg(sp, j, vfg);
    bw.value = evaluate(st, e_star(bw.gamma), bw.sum);
    bw.expected = Rational(bw.a) * ds.theta * st.schedule().inv_m(j);
    return bw;
}

Report hi_witness(XnrSpace& sp, const DependentSequence& ds, long j)
{
    const SpaceStage& st = sp.stage();
    if (ds.pairs.size() < 2)
        throw std::invalid_argument("wiring mismatch: an interleaved sequence needs ≥ 2 terms");
    Report rep;
    rep.suite = "hi";
    const Rational& C = ds.C;
    nlohmann::json rows = nlohmann::json::array();
    long half = static_cast<long>(ds.pairs.size()) / 2;
    for (long n = 1; n <= half; ++n) {
        BlockVector u, w;
        for (long k = 1; k <= n; ++k) {
            u += ds.pairs[2 * k - 1].x;
            w += ds.pairs[2 * k - 2].x;
        }
        std::string at = "n=" + std::to_string(n);
        Rational plus = lower_norm(st, u + w);
        rep.add(make_check("‖u_n + w_n‖ ≤ 10C " + at, plus, Rel::Le, 10 * C));
        Blowup bw = blowup_witness(sp, ds, j, BlowupPattern::Alternating, {}, 2 * n);
        Rational direct = evaluate(st, e_star(bw.gamma), u - w);
        rep.add(make_check("e*_γ(u_n − w_n) = (a/m_j)θ " + at, direct, Rel::Eq, bw.expected));
        Rational ratio = direct / (10 * C);
        Rational want = Rational(bw.a) * ds.theta / (10 * C * Rational(st.schedule().m(j)));
        rep.add(make_check("lower‖u−w‖ / 10C ≥ aθ/(10C m_j) " + at, ratio, Rel::Ge, want));
        rows.push_back({{"n", n}, {"a", bw.a}, {"plus_lower", to_string(plus)},
            {"minus_lower", to_string(direct)}, {"gamma", bw.gamma}});
    }
    rep.extra["rows"] = rows;
    return rep;
}

C0Result c0_estimate(const SpaceStage& st, const std::vector<NodeId>& basis,
    const std::vector<long>& js, const Rational& C, long nmax)
{
    if (js.size() != basis.size())
        throw std::invalid_argument("one j_k per basis element");
    C0Result res;
    long B = static_cast<long>(basis.size());
    std::vector<std::size_t> bidx;
    for (const auto& id : basis)
        bidx.push_back(st.index_of(id));
    Rational worst = 0;
    for (std::size_t g : st.indices_up_to(st.max_rank())) {
        const GammaNode& node = st.node(g);
        if (node.variant == Variant::Base)
            continue;
        ++res.functionals;
        long j = node.j;
        Rational bound = C * st.schedule().inv_m(j);
        Rational mj(st.schedule().m(j));
        std::vector<Rational> a(B);
        for (long k = 0; k < B; ++k)
            a[k] = abs_q(st.coordinate(g, bidx[k]));
        // sets with 1-based indices n ≤ k_1 < … < k_n
        std::vector<long> pick;
        auto rec = [&](auto&& self, long n, long from, Rational acc) -> void {
            if (static_cast<long>(pick.size()) == n) {
                if (!(j < js[n - 1]))
                    return;
                ++res.sets;
                if (acc * mj > worst)
                    worst = acc * mj;
                if (acc > bound) {
                    if (res.violations++ == 0) {
                        std::string w = "γ=" + st.id(g) + " k=";
                        for (long k : pick)
                            w += std::to_string(k) + " ";
                        res.witness = w + "value=" + to_string(acc);
                    }
                }
                return;
            }
            for (long k = from; k <= B; ++k) {
                pick.push_back(k);
                self(self, n, k + 1, acc + a[k - 1]);
                pick.pop_back();
            }
        };
        for (long n = 1; n <= nmax; ++n)
            rec(rec, n, n, Rational(0));
    }
    res.worst_ratio = worst;
    return res;
}

}
