#include "bdlab/xnr.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bdlab {

std::string canonical_q(const QElement& s)
{
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k)
            out += ';';
        out += s[k].first + '|';
        bool first = true;
        for (const auto& [id, c] : s[k].second.coeffs) {
            if (!first)
                out += ',';
            first = false;
            out += id + '=' + to_string(c);
        }
    }
    return out;
}

namespace {

void validate_q(const SpaceStage& st, const QElement& s)
{
    if (s.empty())
        throw InvalidQElement("empty 𝒬-element");
    Rank prev = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& [g, x] = s[k];
        if (!st.contains(g))
            throw InvalidQElement("unregistered node " + g);
        if (st.node(g).variant == Variant::Base)
            throw InvalidQElement("the base node carries no weight");
        if (x.zero())
            throw InvalidQElement("x_" + std::to_string(k + 1) + " is zero");
        for (const auto& kv : x.coeffs)
            if (!st.contains(kv.first))
                throw InvalidQElement("unregistered node " + kv.first + " in x_" + std::to_string(k + 1));
        Interval R = ran(st, x);
        if (R.lo <= prev)
            throw InvalidQElement("x_" + std::to_string(k + 1) + " not successive");
        if (st.rank_of(g) < R.lo)
            throw InvalidQElement("rank(γ_" + std::to_string(k + 1) + ") < min ran x_" + std::to_string(k + 1));
        prev = R.hi;
    }
}

bool is_prefix(const QElement& a, const QElement& b)
{
    if (a.size() > b.size())
        return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].first != b[k].first || a[k].second.coeffs != b[k].second.coeffs)
            return false;
    return true;
}

}

CodingRegistry::CodingRegistry(const CodingRegistry& o) : mode_(o.mode_)
{
    std::lock_guard<std::mutex> lock(o.write_);
    log_ = o.log_;
    by_key_ = o.by_key_;
    by_value_ = o.by_value_;
}

CodingRegistry& CodingRegistry::operator=(const CodingRegistry& o)
{
    if (this == &o)
        return *this;
    std::scoped_lock lock(write_, o.write_);
    mode_ = o.mode_;
    log_ = o.log_;
    by_key_ = o.by_key_;
    by_value_ = o.by_value_;
    return *this;
}

BigInt CodingRegistry::sigma_register(const SpaceStage& st, const QElement& s)
{
    validate_q(st, s);
    std::string key = canonical_q(s);
    std::lock_guard<std::mutex> lock(write_);
    if (auto it = by_key_.find(key); it != by_key_.end())
        return log_[it->second].value;
    BigInt v = 2;
    if (mode_ == Mode::Strict) {
        const auto& [g, x] = s.back();
        BigInt bound = st.schedule().m(st.node(g).j) * BigInt(max_supp(st, x));
        v = std::max(v, BigInt(bound + 1));
    }
    while (by_value_.count(v))
        ++v;
    by_key_.emplace(key, log_.size());
    by_value_.emplace(v, log_.size());
    log_.push_back({key, s, v});
    return v;
}

std::optional<BigInt> CodingRegistry::sigma(const QElement& s) const
{
    std::lock_guard<std::mutex> lock(write_);
    auto it = by_key_.find(canonical_q(s));
    if (it == by_key_.end())
        return std::nullopt;
    return log_[it->second].value;
}

std::optional<QElement> CodingRegistry::preimage(const BigInt& v) const
{
    std::lock_guard<std::mutex> lock(write_);
    auto it = by_value_.find(v);
    if (it == by_value_.end())
        return std::nullopt;
    return log_[it->second].element;
}

long CodingRegistry::weight_after(const SpaceStage& st, const QElement& prefix)
{
    BigInt v = sigma_register(st, prefix);
    if (!v.fits_slong_p())
        throw std::overflow_error("σ-value exceeds the weight index range");
    return v.get_si();
}

bool CodingRegistry::is_special(const SpaceStage& st, const QElement& s) const
{
    try {
        validate_q(st, s);
    } catch (const InvalidQElement&) {
        return false;
    }
    if (st.node(s[0].first).j != 1)
        return false;
    for (std::size_t k = 1; k < s.size(); ++k) {
        QElement prefix(s.begin(), s.begin() + static_cast<long>(k));
        auto v = sigma(prefix);
        if (!v || *v != st.node(s[k].first).j)
            return false;
    }
    return true;
}

std::vector<BigInt> CodingRegistry::special_sequences(const SpaceStage& st) const
{
    std::vector<Record> snapshot;
    {
        std::lock_guard<std::mutex> lock(write_);
        snapshot = log_;
    }
    std::vector<BigInt> out;
    for (const auto& r : snapshot)
        if (is_special(st, r.element))
            out.push_back(r.value);
    return out;
}

std::string CodingRegistry::dump() const
{
    std::lock_guard<std::mutex> lock(write_);
    std::ostringstream os;
    os << nlohmann::json{{"mode", to_string(mode_)}}.dump() << '\n';
    for (const auto& r : log_) {
        nlohmann::json el = nlohmann::json::array();
        for (const auto& [g, x] : r.element)
            el.push_back({g, to_json(x)});
        os << nlohmann::json{{"sigma", r.value.get_str()}, {"key", r.key}, {"element", el}}.dump()
           << '\n';
    }
    return os.str();
}

void CodingRegistry::save(const std::string& path) const
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << dump();
}

CodingRegistry CodingRegistry::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(f, line))
        throw std::runtime_error("empty registry file");
    CodingRegistry reg(parse_mode(nlohmann::json::parse(line).at("mode").get<std::string>()));
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line);
        Record r;
        r.value = parse_bigint(j.at("sigma").get<std::string>());
        for (const auto& p : j.at("element"))
            r.element.emplace_back(p.at(0).get<std::string>(), vector_from_json(p.at(1)));
        r.key = canonical_q(r.element);
        if (r.key != j.at("key").get<std::string>())
            throw std::runtime_error("registry record does not match its key");
        if (reg.by_key_.count(r.key) || reg.by_value_.count(r.value))
            throw std::runtime_error("registry replay breaks injectivity");
        reg.by_key_.emplace(r.key, reg.log_.size());
        reg.by_value_.emplace(r.value, reg.log_.size());
        reg.log_.push_back(std::move(r));
    }
    return reg;
}

bool incomparable(const CodingRegistry& reg, const BigInt& i, const BigInt& j)
{
    if (i < 2 || j < 2 || i == j)
        throw std::invalid_argument("incomparable() needs distinct naturals ≥ 2");
    auto a = reg.preimage(i);
    auto b = reg.preimage(j);
    if (!a && !b)
        return true;
    if (a && b)
        return !is_prefix(*a, *b) && !is_prefix(*b, *a);
    return false;
}

std::vector<AvgKind> Classification::kinds() const
{
    std::vector<AvgKind> k;
    if (ic)
        k.push_back(AvgKind::IC);
    if (co)
        k.push_back(AvgKind::CO);
    if (ir)
        k.push_back(AvgKind::IR);
    return k;
}

namespace {

void check_pairs(const SpaceStage& st, const PairList& pl)
{
    const auto& P = pl.pairs;
    if (P.empty())
        throw InvalidAverage("empty pair list");
    if (BigInt(static_cast<unsigned long>(P.size())) > pl.n)
        throw InvalidAverage("d > n");
    if (!pl.signs.empty() && pl.signs.size() != P.size())
        throw InvalidAverage("sign count differs from pair count");
    for (std::size_t i = 0; i < P.size(); ++i) {
        const GammaNode& g = st.node(P[i].first);
        if (g.variant == Variant::Base)
            throw InvalidAverage("pair node without weight");
        if (i > 0 && g.j <= st.node(P[i - 1].first).j)
            throw InvalidAverage("weights not strictly decreasing");
        if (P[i].second.empty() || g.rank < P[i].second.lo)
            throw InvalidAverage("rank(γ_i) ≥ min E_i violated");
        if (i > 0 && !(P[i - 1].second.hi < P[i].second.lo))
            throw InvalidAverage("intervals not successive");
    }
}

// positions k_i (1-based) in the special sequence s with we(η_{k_i}) = we(γ_i)
std::optional<std::vector<long>> match_weights(const SpaceStage& st, const QElement& s,
    const std::vector<std::pair<NodeId, Interval>>& P)
{
    std::vector<long> pos;
    for (const auto& [g, E] : P) {
        long j = st.node(g).j;
        long found = -1;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (st.node(s[k].first).j == j) {
                found = static_cast<long>(k) + 1;
                break;
            }
        if (found < 0 || (!pos.empty() && found <= pos.back()))
            return std::nullopt;
        pos.push_back(found);
    }
    return pos;
}

std::vector<Rational> pair_values(const SpaceStage& st, const QElement& s,
    const std::vector<std::pair<NodeId, Interval>>& P, const std::vector<long>& pos)
{
    std::vector<Rational> v;
    for (std::size_t i = 0; i < P.size(); ++i)
        v.push_back(evaluate_atom(st, P[i].first, P[i].second, s[pos[i] - 1].second));
    return v;
}

bool co_close(const std::vector<Rational>& v)
{
    std::size_t d = v.size();
    if (d < 4)
        return true;
    // 1-based interior indices 2 ≤ i < j ≤ d−1
    for (std::size_t i = 2; i <= d - 1; ++i)
        for (std::size_t j = i + 1; j <= d - 1; ++j)
            if (!(abs_q(v[i - 1] - v[j - 1]) < make_q(BigInt(1), ipow(2, static_cast<long>(i)))))
                return false;
    return true;
}

bool ir_large(const std::vector<Rational>& v)
{
    std::size_t d = v.size();
    if (d < 3)
        return true;
    for (std::size_t i = 2; i <= d - 1; ++i)
        if (!(abs_q(v[i - 1]) > 16000))
            return false;
    return true;
}

bool alternating(const std::vector<int>& s)
{
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] != -s[i - 1])
            return false;
    return true;
}

}

Classification classify_pairs(const SpaceStage& st, const CodingRegistry& reg, const PairList& pl)
{
    check_pairs(st, pl);
    Classification c;
    const auto& P = pl.pairs;
    c.ic = true;
    for (std::size_t a = 0; a < P.size() && c.ic; ++a)
        for (std::size_t b = a + 1; b < P.size() && c.ic; ++b) {
            long ja = st.node(P[a].first).j, jb = st.node(P[b].first).j;
            if (ja < 2 || jb < 2 || !incomparable(reg, ja, jb))
                c.ic = false;
        }
    bool signs_alt = alternating(pl.signs);
    for (const BigInt& v : reg.special_sequences(st)) {
        if (c.co && c.ir)
            break;
        QElement s = *reg.preimage(v);
        if (s.size() < P.size())
            continue;
        auto pos = match_weights(st, s, P);
        if (!pos)
            continue;
        auto vals = pair_values(st, s, P, *pos);
        if (!c.co && signs_alt && co_close(vals)) {
            c.co = true;
            c.co_cert = {{AvgKind::CO}, v, *pos};
        }
        if (!c.ir && ir_large(vals)) {
            c.ir = true;
            c.ir_cert = {{AvgKind::IR}, v, *pos};
        }
    }
    return c;
}

Homogeneous select_homogeneous(const SpaceStage& st, const CodingRegistry& reg,
    const std::vector<std::pair<NodeId, Interval>>& pairs)
{
    // usable: weighted nodes with strictly increasing weight index
    std::vector<std::size_t> use;
    long last = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const GammaNode& g = st.node(pairs[i].first);
        if (g.variant == Variant::Base || g.j <= last)
            continue;
        use.push_back(i);
        last = g.j;
    }
    if (use.size() < 3)
        throw std::invalid_argument("fewer than 3 usable pairs");
    auto jof = [&](std::size_t i) { return st.node(pairs[i].first).j; };

    Homogeneous ic{{}, AvgKind::IC};
    for (std::size_t i : use) {
        if (jof(i) < 2)
            continue;
        bool ok = std::all_of(ic.indices.begin(), ic.indices.end(),
            [&](std::size_t k) { return incomparable(reg, jof(k), jof(i)); });
        if (ok)
            ic.indices.push_back(i);
    }
    Homogeneous best = ic;
    for (const BigInt& v : reg.special_sequences(st)) {
        QElement s = *reg.preimage(v);
        std::vector<std::size_t> chain;
        std::map<std::string, std::vector<std::size_t>> by_value;
        std::vector<std::size_t> large;
        for (std::size_t i : use) {
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (st.node(s[k].first).j != jof(i))
                    continue;
                Rational val = evaluate_atom(st, pairs[i].first, pairs[i].second, s[k].second);
                by_value[to_string(val)].push_back(i);
                if (abs_q(val) > 16000)
                    large.push_back(i);
                break;
            }
        }
        for (const auto& kv : by_value)
            if (kv.second.size() > best.indices.size())
                best = {kv.second, AvgKind::CO};
        if (large.size() > best.indices.size())
            best = {large, AvgKind::IR};
    }
    return best;
}

XnrSpace::XnrSpace(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th, Mode coding)
    : stage_(std::move(ws), std::move(th), SpaceTag::Xnr), reg_(coding)
{
    stage_.set_validator([](const SpaceStage& s, const GammaNode& g) {
        Verdict v = is_legal_bmt_node(s, g);
        if (!v)
            throw IllegalNode(v.reason);
    });
}

Verdict XnrSpace::is_legal(const GammaNode& g) const
{
    return is_legal_xnr_node(stage_, reg_, gamma_, g);
}

NodeId XnrSpace::admit(GammaNode g)
{
    NodeId id = content_id(g);
    if (gamma_.count(id))
        return id;
    if (g.variant != Variant::Base && g.avg.kind != AvgKind::Basic && g.avg.cert.kinds.empty())
        g.avg = certify(g.avg);
    Verdict v = is_legal(g);
    if (!v)
        throw IllegalNode(v.reason);
    id = stage_.register_node(g);
    gamma_.insert(id);
    return id;
}

NodeId XnrSpace::admit_bar(const GammaNode& g)
{
    return stage_.register_node(g);
}

SubsetSpec XnrSpace::gamma() const
{
    SubsetSpec s;
    s.tag = "Gamma";
    s.members = gamma_;
    return s;
}

NodeId XnrSpace::base()
{
    return admit(base_node());
}

NodeId XnrSpace::canonical(Rank r, long j)
{
    base();
    return admit(canonical_node(stage_, r, j));
}

AlphaAverage XnrSpace::certify(AlphaAverage a) const
{
    if (a.kind == AvgKind::Basic) {
        a.cert = {};
        if (check_alpha_average(stage_, a))
            a.cert.kinds = {AvgKind::Basic};
        return a;
    }
    PairList pl;
    for (const auto& e : a.entries) {
        pl.pairs.emplace_back(e.node, e.E);
        pl.signs.push_back(e.sign);
    }
    pl.n = a.size;
    Classification c;
    try {
        c = classify_pairs(stage_, reg_, pl);
    } catch (const std::exception&) {
        a.kind = AvgKind::Plain;
        a.cert = {};
        return a;
    }
    auto kinds = c.kinds();
    a.cert = {};
    a.cert.kinds = kinds;
    if (kinds.empty()) {
        a.kind = AvgKind::Plain;
        return a;
    }
    if (std::find(kinds.begin(), kinds.end(), a.kind) == kinds.end())
        a.kind = kinds.front();
    if (a.kind == AvgKind::CO) {
        a.cert.sequence = c.co_cert.sequence;
        a.cert.positions = c.co_cert.positions;
    } else if (a.kind == AvgKind::IR) {
        a.cert.sequence = c.ir_cert.sequence;
        a.cert.positions = c.ir_cert.positions;
    }
    return a;
}

Verdict is_legal_xnr_node(const SpaceStage& st, const CodingRegistry& reg,
    const std::set<NodeId>& gamma, const GammaNode& g)
{
    try {
        Verdict bar = is_legal_bmt_node(st, g);
        if (!bar)
            return Verdict::no("not in Δ̄: " + bar.reason);
        if (g.variant == Variant::Base)
            return Verdict::yes();
        const AlphaAverage& a = g.avg;
        if (a.entries.empty())
            return Verdict::no("an α_c-average needs d ≥ 1");
        for (const auto& e : a.entries)
            if (!gamma.count(e.node))
                return Verdict::no("average entry " + e.node + " not in Γ_q");
        if (g.variant == Variant::Succ) {
            if (!gamma.count(g.pred))
                return Verdict::no("pred not in Γ_q");
            if (!st.meets_threshold(a.size, st.rank_of(g.pred)))
                return Verdict::no("size clause s(b*) ≥ 𝒩_{ra(ξ)} fails");
        }
        switch (a.kind) {
        case AvgKind::Plain:
            return Verdict::no("average of kind plain carries no α_c certificate");
        case AvgKind::Basic: {
            Verdict v = check_alpha_average(st, a);
            return v ? v : Verdict::no("basic average: " + v.reason);
        }
        default: break;
        }
        PairList pl;
        for (const auto& e : a.entries) {
            pl.pairs.emplace_back(e.node, e.E);
            pl.signs.push_back(e.sign);
        }
        pl.n = a.size;
        Classification c = classify_pairs(st, reg, pl);
        bool ok = (a.kind == AvgKind::IC && c.ic) || (a.kind == AvgKind::CO && c.co) ||
            (a.kind == AvgKind::IR && c.ir);
        if (!ok)
            return Verdict::no("pair list is not " + to_string(a.kind));
        return Verdict::yes();
    } catch (const InvalidAverage& e) {
        return Verdict::no(std::string("invalid average: ") + e.what());
    } catch (const UnknownNode& e) {
        return Verdict::no(e.what());
    }
}

DualFunctional EvaluationAnalysis::functional(const SpaceStage& st) const
{
    return partial(st, 0);
}

DualFunctional EvaluationAnalysis::partial(const SpaceStage& st, std::size_t t) const
{
    DualFunctional f;
    if (t > 0)
        f += e_star(steps.at(t - 1).xi);
    Rational w = st.schedule().inv_m(j);
    for (std::size_t r = t; r < steps.size(); ++r) {
        f += d_star(st, steps[r].xi);
        f += as_functional(steps[r].b).scaled(w);
    }
    return f;
}

EvaluationAnalysis evaluation_analysis(const SpaceStage& st, const NodeId& gamma)
{
    const GammaNode& g = st.node(gamma);
    if (g.variant == Variant::Base)
        throw std::invalid_argument("the base node has no evaluation analysis");
    EvaluationAnalysis ea;
    ea.gamma = gamma;
    ea.j = g.j;
    NodeId cur = gamma;
    while (true) {
        const GammaNode& n = st.node(cur);
        ea.steps.push_back({cur, n.avg});
        if (n.variant != Variant::Succ)
            break;
        cur = n.pred;
    }
    std::reverse(ea.steps.begin(), ea.steps.end());
    return ea;
}

AnalysisCheck verify_evaluation_analysis(const SpaceStage& st, const NodeId& gamma)
{
    AnalysisCheck chk;
    EvaluationAnalysis ea = evaluation_analysis(st, gamma);
    Rank top = st.rank_of(gamma);
    std::vector<DualFunctional> forms{ea.functional(st)};
    for (std::size_t t = 1; t < ea.steps.size(); ++t)
        forms.push_back(ea.partial(st, t));
    std::size_t g = st.index_of(gamma);
    for (std::size_t eta : st.indices_up_to(top)) {
        BlockVector d = unit_vector(st.id(eta));
        Rational want = st.coordinate(g, eta);
        for (std::size_t f = 0; f < forms.size(); ++f) {
            if (evaluate(st, forms[f], d) != want && chk.exact) {
                chk.exact = false;
                chk.witness = "form " + std::to_string(f) + " at " + st.id(eta);
            }
        }
        ++chk.vectors;
    }
    Rank prev = 0;
    for (std::size_t r = 0; r < ea.steps.size(); ++r) {
        Rank pr = st.rank_of(ea.steps[r].xi);
        for (const auto& e : ea.steps[r].b.entries)
            if (e.E.lo <= prev || e.E.hi > pr - 1 || st.rank_of(e.node) <= prev)
                chk.windows = false;
        if (r > 0 && !st.meets_threshold(ea.steps[r].b.size, prev))
            chk.vfg = false;
        prev = pr;
    }
    chk.vfg = chk.vfg && chk.windows;
    return chk;
}

NodeId build_gamma_from_vfg(XnrSpace& sp, long j, const std::vector<AlphaAverage>& vfg)
{
    const SpaceStage& st = sp.stage();
    if (vfg.empty() || BigInt(static_cast<unsigned long>(vfg.size())) > st.schedule().n(j))
        throw std::invalid_argument("need 1 ≤ a ≤ n_j");
    Rank p_prev = vfg[0].p;
    if (p_prev < 0)
        throw std::invalid_argument("p_0 must be ≥ 0");
    NodeId xi;
    for (std::size_t r = 0; r < vfg.size(); ++r) {
        const AlphaAverage& b = vfg[r];
        std::string tag = "r=" + std::to_string(r + 1) + ": ";
        if (b.p != p_prev)
            throw std::invalid_argument(tag + "window does not start at p_{r−1}");
        Rank p = b.q + 1;
        if (p <= p_prev)
            throw std::invalid_argument(tag + "windows not increasing");
        if (r == 0 && j > p)
            throw std::invalid_argument(tag + "j ≤ p_1 violated");
        GammaNode g = r == 0 ? age_one(p, j, b) : succ(p, xi, j, b);
        if (g.avg.kind != AvgKind::Basic)
            g.avg = sp.certify(g.avg);
        try {
            xi = sp.admit(g);
        } catch (const IllegalNode& e) {
            throw IllegalNode(tag + e.what());
        }
        p_prev = p;
    }
    return xi;
}

std::vector<NodeId> ramsey_basis_select(const SpaceStage& st, const std::vector<NodeId>& gammas)
{
    std::vector<NodeId> sorted = gammas;
    std::stable_sort(sorted.begin(), sorted.end(),
        [&](const NodeId& a, const NodeId& b) { return st.rank_of(a) < st.rank_of(b); });
    auto chain = [&](const NodeId& g) {
        std::set<NodeId> c;
        NodeId cur = g;
        while (true) {
            c.insert(cur);
            const GammaNode& n = st.node(cur);
            if (n.variant != Variant::Succ)
                break;
            cur = n.pred;
        }
        return c;
    };
    std::vector<NodeId> kept;
    std::vector<std::set<NodeId>> chains;
    for (const auto& g : sorted) {
        auto c = chain(g);
        bool related = false;
        for (std::size_t k = 0; k < kept.size() && !related; ++k)
            related = c.count(kept[k]) || chains[k].count(g);
        if (!related) {
            kept.push_back(g);
            chains.push_back(std::move(c));
        }
    }
    return kept;
}

}
