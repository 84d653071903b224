#include "bdlab/schedule.hpp"

#include <stdexcept>

namespace bdlab {

std::string to_string(Mode m) { return m == Mode::Toy ? "toy" : "strict"; }

Mode parse_mode(const std::string& s)
{
    if (s == "toy")
        return Mode::Toy;
    if (s == "strict")
        return Mode::Strict;
    throw std::invalid_argument("unknown mode: " + s);
}

WeightSchedule::WeightSchedule(long base, NRule rule, Mode mode, long depth)
    : base_(base), rule_(std::move(rule)), mode_(mode), depth_(depth)
{
}

BigInt WeightSchedule::m(long j) const
{
    if (j < 1)
        throw std::out_of_range("weight index must be ≥ 1");
    return ipow(base_, j);
}

BigInt WeightSchedule::n(long j) const
{
    if (j < 1)
        throw std::out_of_range("weight index must be ≥ 1");
    if (rule_.kind == NRule::Kind::List) {
        if (j > static_cast<long>(rule_.values.size()))
            throw std::out_of_range("n_j beyond the listed schedule");
        return rule_.values[j - 1];
    }
    return BigInt(rule_.coef) * ipow(rule_.base, rule_.exponent * j);
}

Rational WeightSchedule::inv_m(long j) const { return inv_pow(base_, j); }

Rational WeightSchedule::sum_inv_m() const { return make_q(1, base_ - 1); }

Rational WeightSchedule::tail_inv_m(long i) const
{
    return make_q(BigInt(1), BigInt(base_ - 1) * ipow(base_, i));
}

nlohmann::json WeightSchedule::to_json() const
{
    nlohmann::json r;
    r["base"] = base_;
    if (rule_.kind == NRule::Kind::Power) {
        r["n_rule"] = {{"kind", "power"}, {"coef", rule_.coef}, {"base", rule_.base},
            {"exponent", rule_.exponent}};
    } else {
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& v : rule_.values)
            vals.push_back(v.get_str());
        r["n_rule"] = {{"kind", "list"}, {"values", vals}};
    }
    r["mode"] = bdlab::to_string(mode_);
    r["depth"] = depth_;
    return r;
}

WeightSchedule make_schedule(long base, NRule rule, Mode mode, long depth)
{
    if (base < 8)
        throw std::invalid_argument("m_1 = base must be at least 8");
    if (rule.kind == NRule::Kind::List) {
        if (rule.values.empty())
            throw std::invalid_argument("empty n_j list");
        depth = static_cast<long>(rule.values.size());
    } else {
        if (rule.coef < 1 || rule.base < 2 || rule.exponent < 1)
            throw std::invalid_argument("n_j rule must be strictly increasing and positive");
        // n_j ≥ m_j for every j needs base^exponent ≥ base (then coef ≥ 1 suffices)
        if (ipow(rule.base, rule.exponent) < BigInt(base))
            throw std::invalid_argument("n_j < m_j for large j");
    }
    WeightSchedule ws(base, rule, mode, depth);
    for (long j = 1; j <= depth; ++j) {
        BigInt nj = ws.n(j);
        if (nj < 1)
            throw std::invalid_argument("n_j must be positive");
        if (j > 1 && nj <= ws.n(j - 1))
            throw std::invalid_argument("n_j not strictly increasing at j=" + std::to_string(j));
        if (nj < ws.m(j))
            throw std::invalid_argument("n_j < m_j at j=" + std::to_string(j));
    }
    return ws;
}

WeightSchedule schedule_from_json(const nlohmann::json& j)
{
    long base = j.at("base").get<long>();
    NRule rule;
    const auto& nr = j.at("n_rule");
    std::string kind = nr.at("kind").get<std::string>();
    if (kind == "power") {
        rule.kind = NRule::Kind::Power;
        rule.coef = nr.value("coef", 1L);
        rule.base = nr.value("base", base);
        rule.exponent = nr.value("exponent", 1L);
    } else if (kind == "list") {
        rule.kind = NRule::Kind::List;
        for (const auto& v : nr.at("values"))
            rule.values.push_back(v.is_string() ? parse_bigint(v.get<std::string>()) : BigInt(v.get<long>()));
    } else {
        throw std::invalid_argument("unknown n_rule kind: " + kind);
    }
    Mode mode = parse_mode(j.value("mode", std::string("toy")));
    return make_schedule(base, rule, mode, j.value("depth", 16L));
}

WeightSchedule toy_schedule_t1(long depth)
{
    NRule r;
    r.kind = NRule::Kind::Power;
    r.coef = 1;
    r.base = 8;
    r.exponent = 2;
    return make_schedule(8, r, Mode::Toy, depth);
}

bool LacunarityReport::all_pass() const
{
    for (const auto& it : items)
        if (!it.pass)
            return false;
    return true;
}

bool LacunarityReport::binding_pass() const
{
    for (const auto& it : items)
        if (it.binding && !it.pass)
            return false;
    return true;
}

nlohmann::json LacunarityReport::to_json() const
{
    nlohmann::json r;
    r["mode"] = bdlab::to_string(mode);
    r["depth"] = depth;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& it : items) {
        arr.push_back({{"item", std::string(1, it.item)}, {"i", it.i}, {"j", it.j},
            {"lhs", bdlab::to_string(it.lhs)}, {"rhs", bdlab::to_string(it.rhs)},
            {"relation", it.relation}, {"pass", it.pass},
            {"binding", it.binding}});
    }
    r["items"] = arr;
    r["pass"] = binding_pass();
    return r;
}

LacunarityReport validate_strict(const WeightSchedule& ws, long depth)
{
    LacunarityReport rep{ws.mode(), depth, {}};
    if (depth > ws.depth())
        throw std::invalid_argument("depth beyond the schedule");
    // (a) consecutive weights are the worst case of a decreasing run
    for (long i = 1; i <= depth; ++i) {
        Rational sum = 0;
        for (long j = i; j <= depth; ++j) {
            sum += ws.inv_m(j);
            Rational rhs = 2 * ws.inv_m(i);
            rep.items.push_back({'a', i, j, sum, rhs, "<=", sum <= rhs, true});
        }
    }
    // (b) for i < j
    for (long i = 1; i <= depth; ++i) {
        for (long j = i + 1; j <= depth; ++j) {
            Rational mi(ws.m(i)), ni(ws.n(i)), mj(ws.m(j)), nj(ws.n(j));
            Rational lhs = 10 * ni * mi / nj + 10 * mi / mj + 4 * ni * mi * mj / nj;
            Rational rhs = 24 * mi / mj;
            lhs.canonicalize();
            rhs.canonicalize();
            rep.items.push_back({'b', i, j, lhs, rhs, "<", lhs < rhs, ws.mode() == Mode::Strict});
        }
    }
    // (c) only binding in strict mode
    for (long j = 2; j <= depth; ++j) {
        Rational lhs(ws.n(j));
        Rational rhs(ws.m(j) * ws.m(j) * ws.n(j - 1));
        rep.items.push_back({'c', j - 1, j, lhs, rhs, ">", lhs > rhs, ws.mode() == Mode::Strict});
    }
    return rep;
}

}
