#include "bdlab/stage.hpp"
#include "bdlab/kernels.hpp"

#include <algorithm>
#include <unordered_map>

namespace bdlab {

std::string to_string(SpaceTag t)
{
    switch (t) {
    case SpaceTag::Bmt:
        return "bmt";
    case SpaceTag::Xnr:
        return "xnr";
    case SpaceTag::Quotient:
        return "quotient";
    case SpaceTag::Generic:
        return "generic";
    }
    return "?";
}

SpaceTag parse_space_tag(const std::string& s)
{
    if (s == "bmt")
        return SpaceTag::Bmt;
    if (s == "xnr")
        return SpaceTag::Xnr;
    if (s == "quotient")
        return SpaceTag::Quotient;
    if (s == "generic")
        return SpaceTag::Generic;
    throw std::invalid_argument("unknown space: " + s);
}

nlohmann::json ThresholdPolicy::to_json() const
{
    nlohmann::json r;
    r["growth"] = name();
    if (kind == Kind::Explicit) {
        nlohmann::json vals = nlohmann::json::object();
        for (const auto& [q, v] : values)
            vals[std::to_string(q)] = v.get_str();
        r["values"] = vals;
        r["fallback"] = fallback.get_str();
    }
    return r;
}

ThresholdPolicy ThresholdPolicy::from_json(const nlohmann::json& j)
{
    ThresholdPolicy p;
    std::string g = j.value("growth", std::string("explicit"));
    if (g == "factorial") {
        p.kind = Kind::Factorial;
        return p;
    }
    if (g != "explicit")
        throw std::invalid_argument("unknown growth policy: " + g);
    p.kind = Kind::Explicit;
    if (j.contains("values"))
        for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it)
            p.values[std::stol(it.key())] = parse_bigint(it.value().get<std::string>());
    if (j.contains("fallback"))
        p.fallback = parse_bigint(j.at("fallback").get<std::string>());
    return p;
}

SpaceStage::SpaceStage(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th, SpaceTag tag)
    : ws_(std::move(ws)), th_(std::move(th)), tag_(tag)
{
}

std::size_t SpaceStage::index_of(const NodeId& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw UnknownNode("unregistered node " + id);
    return it->second;
}

std::size_t SpaceStage::count_up_to(Rank q) const
{
    std::size_t c = 0;
    for (const auto& [r, v] : by_rank_) {
        if (r > q)
            break;
        c += v.size();
    }
    return c;
}

std::vector<std::size_t> SpaceStage::indices_up_to(Rank Q) const
{
    std::vector<std::size_t> out;
    for (const auto& [r, v] : by_rank_) {
        if (r > Q)
            break;
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

const std::vector<std::size_t>& SpaceStage::at_rank(Rank r) const
{
    static const std::vector<std::size_t> empty;
    auto it = by_rank_.find(r);
    return it == by_rank_.end() ? empty : it->second;
}

std::vector<Rank> SpaceStage::ranks() const
{
    std::vector<Rank> out;
    for (const auto& kv : by_rank_)
        out.push_back(kv.first);
    return out;
}

static void check_structure(const SpaceStage& st, const GammaNode& g)
{
    if (g.variant == Variant::Base) {
        if (g.rank != 1)
            throw IllegalNode("base node must have rank 1");
        return;
    }
    if (g.rank < 2)
        throw IllegalNode("non-base node must have rank ≥ 2");
    if (g.j < 1)
        throw IllegalNode("weight index must be ≥ 1");
    if (g.avg.size < 1)
        throw IllegalNode("average size must be positive");
    for (const auto& e : g.avg.entries) {
        if (!st.contains(e.node))
            throw IllegalNode("average references unregistered node " + e.node);
        if (st.rank_of(e.node) >= g.rank)
            throw IllegalNode("average references a node of rank ≥ rank(γ)");
        if (e.sign != 1 && e.sign != -1)
            throw IllegalNode("signs must be ±1");
    }
    if (g.variant == Variant::Succ) {
        if (!st.contains(g.pred))
            throw IllegalNode("pred not registered");
        if (st.rank_of(g.pred) >= g.rank)
            throw IllegalNode("pred rank must be below rank(γ)");
    }
}

NodeId SpaceStage::register_node(const GammaNode& g)
{
    NodeId id = content_id(g);
    if (auto it = index_.find(id); it != index_.end()) {
        if (contents_[it->second] != canonical_content(g))
            throw IllegalNode("content hash collision on " + id);
        return id;
    }
    check_structure(*this, g);
    if (validator_)
        validator_(*this, g);
    return register_unchecked(g);
}

NodeId SpaceStage::register_unchecked(const GammaNode& g)
{
    NodeId id = content_id(g);
    std::string content = canonical_content(g);
    if (auto it = index_.find(id); it != index_.end()) {
        if (contents_[it->second] != content)
            throw IllegalNode("content hash collision on " + id);
        return id;
    }
    check_structure(*this, g);
    std::size_t idx = nodes_.size();
    nodes_.push_back(g);
    ids_.push_back(id);
    ages_.push_back(g.variant == Variant::Succ ? ages_[index_of(g.pred)] + 1 : 1);
    contents_.push_back(std::move(content));
    rows_.emplace_back();
    index_.emplace(id, idx);
    by_rank_[g.rank].push_back(idx);
    compute_row(idx);
    return id;
}

void SpaceStage::compute_row(std::size_t idx)
{
    const GammaNode& g = nodes_[idx];
    std::map<std::uint32_t, Rational> acc;
    acc[static_cast<std::uint32_t>(idx)] = 1;
    if (g.variant == Variant::Succ)
        for (const auto& [k, c] : rows_[index_of(g.pred)])
            acc[k] += c;
    if (g.variant != Variant::Base) {
        Rational scale = make_q(BigInt(1), g.avg.size * ws_->m(g.j));
        for (const auto& e : g.avg.entries) {
            Rational coef = scale * e.sign;
            for (const auto& [k, c] : rows_[index_of(e.node)])
                if (e.E.contains(nodes_[k].rank))
                    acc[k] += coef * c;
        }
    }
    SparseRow row;
    row.reserve(acc.size());
    for (auto& [k, c] : acc)
        if (c != 0)
            row.emplace_back(k, std::move(c));
    rows_[idx] = std::move(row);
}

Rational SpaceStage::coordinate(std::size_t g, std::size_t x) const
{
    const SparseRow& r = rows_[g];
    auto it = std::lower_bound(r.begin(), r.end(), static_cast<std::uint32_t>(x),
        [](const auto& a, std::uint32_t b) { return a.first < b; });
    if (it == r.end() || it->first != x)
        return 0;
    return it->second;
}

Rational SpaceStage::coordinate(const NodeId& gamma, const NodeId& xi) const
{
    return coordinate(index_of(gamma), index_of(xi));
}

Rational SpaceStage::coordinate_uncached(const NodeId& gamma, const NodeId& xi) const
{
    std::size_t target = index_of(xi);
    Rank rx = nodes_[target].rank;
    std::unordered_map<std::size_t, Rational> memo;
    std::function<Rational(std::size_t)> eval = [&](std::size_t gi) -> Rational {
        if (auto it = memo.find(gi); it != memo.end())
            return it->second;
        const GammaNode& g = nodes_[gi];
        Rational v = gi == target ? Rational(1) : Rational(0);
        if (g.rank > rx) {
            if (g.variant == Variant::Succ)
                v += eval(index_of(g.pred));
            if (g.variant != Variant::Base) {
                Rational s = 0;
                for (const auto& e : g.avg.entries)
                    if (e.E.contains(rx))
                        s += e.sign * eval(index_of(e.node));
                s /= Rational(g.avg.size * ws_->m(g.j));
                v += s;
            }
        }
        memo.emplace(gi, v);
        return v;
    };
    return eval(index_of(gamma));
}

bool SpaceStage::divides_threshold(const BigInt& n, Rank q1) const
{
    if (n == 1)
        return true;
    if (n < 1 || q1 < 2)
        return false;
    Rank q = q1 - 1;
    std::size_t count = count_up_to(q);
    if (count == 0)
        return false;
    // n ≤ 2^q ≤ M
    if (static_cast<std::size_t>(q) >= mpz_sizeinbase(n.get_mpz_t(), 2))
        return true;
    BigInt M = ipow(2, q) * BigInt(static_cast<unsigned long>(count));
    if (n <= M)
        return true;
    // Legendre: every p^e ‖ n needs v_p(M!) ≥ e
    BigInt rest = n;
    auto legendre = [&](const BigInt& p) {
        BigInt v = 0, pk = p;
        while (pk <= M) {
            v += M / pk;
            pk *= p;
        }
        return v;
    };
    for (BigInt p = 2; p * p <= rest; ++p) {
        if (p > M)
            return false;
        if (rest % p != 0)
            continue;
        BigInt e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (legendre(p) < e)
            return false;
    }
    return rest <= M;
}

bool SpaceStage::meets_threshold(const BigInt& s, Rank q1) const
{
    if (th_.kind == ThresholdPolicy::Kind::Explicit) {
        auto it = th_.values.find(q1);
        return s >= (it == th_.values.end() ? th_.fallback : it->second);
    }
    if (q1 < 2)
        return s >= 1;
    Rank q = q1 - 1;
    std::size_t count = count_up_to(q);
    if (count == 0)
        return s >= 1;
    bool huge = q >= 64;
    BigInt M = huge ? BigInt(0) : ipow(2, q) * BigInt(static_cast<unsigned long>(count));
    BigInt f = 1;
    for (BigInt i = 1; huge || i <= M; ++i) {
        f *= i;
        if (f > s)
            return false;
    }
    return true;
}

DualFunctional e_star(const NodeId& gamma, Interval E)
{
    DualFunctional f;
    f.add(1, gamma, E);
    return f;
}

DualFunctional d_star(const SpaceStage& st, const NodeId& gamma)
{
    return e_star(gamma, Interval::point(st.rank_of(gamma)));
}

DualFunctional c_star(const SpaceStage& st, const NodeId& gamma)
{
    const GammaNode& g = st.node(gamma);
    DualFunctional f;
    if (g.variant == Variant::Base)
        return f;
    if (g.variant == Variant::Succ)
        f.add(1, g.pred);
    Rational scale = make_q(BigInt(1), g.avg.size * st.schedule().m(g.j));
    for (const auto& e : g.avg.entries)
        f.add(scale * e.sign, e.node, e.E);
    return f;
}

Rational evaluate_atom(const SpaceStage& st, const NodeId& gamma, const Interval& E,
    const BlockVector& x)
{
    std::size_t g = st.index_of(gamma);
    Rational s = 0;
    for (const auto& [id, c] : x.coeffs) {
        std::size_t xi = st.index_of(id);
        if (E.contains(st.rank(xi)))
            s += c * st.coordinate(g, xi);
    }
    return s;
}

Rational evaluate(const SpaceStage& st, const DualFunctional& f, const BlockVector& x)
{
    Rational s = 0;
    for (const auto& t : f.terms)
        s += t.coef * evaluate_atom(st, t.node, t.E, x);
    return s;
}

BlockVector project(const SpaceStage& st, const BlockVector& x, const Interval& E)
{
    BlockVector r;
    for (const auto& [id, c] : x.coeffs)
        if (E.contains(st.rank_of(id)))
            r.coeffs.emplace(id, c);
    return r;
}

Rank min_supp(const SpaceStage& st, const BlockVector& x)
{
    Rank m = kRankInf;
    for (const auto& kv : x.coeffs)
        m = std::min(m, st.rank_of(kv.first));
    return m;
}

Rank max_supp(const SpaceStage& st, const BlockVector& x)
{
    Rank m = 0;
    for (const auto& kv : x.coeffs)
        m = std::max(m, st.rank_of(kv.first));
    return m;
}

Interval ran(const SpaceStage& st, const BlockVector& x)
{
    if (x.zero())
        return {1, 0};
    return {min_supp(st, x), max_supp(st, x)};
}

SparseRow dense(const SpaceStage& st, const BlockVector& x)
{
    SparseRow r;
    r.reserve(x.coeffs.size());
    for (const auto& [id, c] : x.coeffs)
        r.emplace_back(static_cast<std::uint32_t>(st.index_of(id)), c);
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return r;
}

HorizonNorm horizon_norm(const SpaceStage& st, const BlockVector& x, Rank Q)
{
    if (!x.zero() && max_supp(st, x) > Q)
        throw std::invalid_argument("support of x exceeds the horizon");
    HorizonNorm h;
    if (x.zero()) {
        h.lower = 0;
        h.upper = 0;
        return h;
    }
    auto res = kernels::horizon_lower_parallel(st, st.indices_up_to(Q), dense(st, x));
    h.lower = res.value;
    h.upper = 2 * res.value;
    h.argmax = res.argmax;
    return h;
}

HorizonNorm horizon_norm(const SpaceStage& st, const BlockVector& x)
{
    return horizon_norm(st, x, st.max_rank());
}

Rational sup_over_intervals(const SpaceStage& st, std::size_t gamma, const SparseRow& x)
{
    std::map<Rank, Rational> by_rank;
    for (const auto& [k, c] : x) {
        Rational v = st.coordinate(gamma, k);
        if (v != 0)
            by_rank[st.rank(k)] += c * v;
    }
    Rational run = 0, lo = 0, hi = 0;
    for (const auto& kv : by_rank) {
        run += kv.second;
        if (run < lo)
            lo = run;
        if (run > hi)
            hi = run;
    }
    return hi - lo;
}

Rational extension_row_mass(const SpaceStage& st, std::size_t gamma, Rank q)
{
    std::unordered_map<std::uint32_t, Rational> residual;
    for (const auto& [k, c] : st.row(gamma))
        if (st.rank(k) <= q)
            residual[k] = c;
    Rational mass = 0;
    auto ranks = st.ranks();
    for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
        if (*it > q)
            continue;
        for (std::size_t z : st.at_rank(*it)) {
            auto f = residual.find(static_cast<std::uint32_t>(z));
            if (f == residual.end() || f->second == 0)
                continue;
            Rational w = f->second;
            mass += abs_q(w);
            for (const auto& [k, c] : st.row(z))
                if (k != z)
                    residual[k] -= w * c;
        }
    }
    return mass;
}

ExtensionReport check_extension_bound(const SpaceStage& st, Rank q, Rank Q)
{
    ExtensionReport rep;
    rep.q = q;
    rep.Q = Q;
    auto gammas = st.indices_up_to(Q);
    rep.rows = gammas.size();
    auto res = kernels::extension_masses_parallel(st, gammas, q);
    rep.max_mass = res.value;
    rep.argmax = res.argmax;
    return rep;
}

}
