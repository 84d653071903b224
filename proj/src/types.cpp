#include "bdlab/types.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bdlab {

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::Base:
        return "base";
    case Variant::AgeOne:
        return "age_one";
    case Variant::Succ:
        return "succ";
    }
    return "?";
}

Variant parse_variant(const std::string& s)
{
    if (s == "base")
        return Variant::Base;
    if (s == "age_one")
        return Variant::AgeOne;
    if (s == "succ")
        return Variant::Succ;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(AvgKind k)
{
    switch (k) {
    case AvgKind::Plain:
        return "plain";
    case AvgKind::Basic:
        return "basic";
    case AvgKind::IC:
        return "IC";
    case AvgKind::CO:
        return "CO";
    case AvgKind::IR:
        return "IR";
    }
    return "?";
}

AvgKind parse_kind(const std::string& s)
{
    if (s == "plain")
        return AvgKind::Plain;
    if (s == "basic")
        return AvgKind::Basic;
    if (s == "IC")
        return AvgKind::IC;
    if (s == "CO")
        return AvgKind::CO;
    if (s == "IR")
        return AvgKind::IR;
    throw std::invalid_argument("unknown average kind: " + s);
}

void BlockVector::add(const NodeId& id, const Rational& c)
{
    if (c == 0)
        return;
    auto it = coeffs.find(id);
    if (it == coeffs.end()) {
        coeffs.emplace(id, c);
        return;
    }
    it->second += c;
    if (it->second == 0)
        coeffs.erase(it);
}

BlockVector& BlockVector::operator+=(const BlockVector& o)
{
    for (const auto& [id, c] : o.coeffs)
        add(id, c);
    return *this;
}

BlockVector BlockVector::scaled(const Rational& c) const
{
    BlockVector r;
    if (c == 0)
        return r;
    for (const auto& [id, v] : coeffs)
        r.coeffs.emplace(id, v * c);
    return r;
}

BlockVector unit_vector(const NodeId& id)
{
    BlockVector r;
    r.add(id, 1);
    return r;
}

BlockVector operator+(const BlockVector& a, const BlockVector& b)
{
    BlockVector r = a;
    r += b;
    return r;
}

BlockVector operator-(const BlockVector& a, const BlockVector& b)
{
    BlockVector r = a;
    r += b.scaled(-1);
    return r;
}

DualFunctional& DualFunctional::operator+=(const DualFunctional& o)
{
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
}

DualFunctional DualFunctional::scaled(const Rational& c) const
{
    DualFunctional r = *this;
    for (auto& t : r.terms)
        t.coef *= c;
    return r;
}

nlohmann::json to_json(const Interval& e)
{
    return nlohmann::json::array({e.lo, e.hi == kRankInf ? nlohmann::json("inf") : nlohmann::json(e.hi)});
}

Interval interval_from_json(const nlohmann::json& j)
{
    Interval e;
    e.lo = j.at(0).get<Rank>();
    e.hi = j.at(1).is_string() ? kRankInf : j.at(1).get<Rank>();
    return e;
}

nlohmann::json to_json(const AlphaAverage& a)
{
    nlohmann::json r;
    r["n"] = a.size.get_str();
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : a.entries)
        ents.push_back({e.sign, e.node, to_json(e.E)});
    r["entries"] = ents;
    r["window"] = {a.p, a.q};
    r["kind"] = to_string(a.kind);
    if (!a.cert.kinds.empty() || a.cert.sequence != 0) {
        nlohmann::json kinds = nlohmann::json::array();
        for (auto k : a.cert.kinds)
            kinds.push_back(to_string(k));
        r["certificate"] = {{"kinds", kinds}, {"sequence", a.cert.sequence.get_str()},
            {"positions", a.cert.positions}};
    }
    return r;
}

AlphaAverage average_from_json(const nlohmann::json& j)
{
    AlphaAverage a;
    a.size = parse_bigint(j.at("n").get<std::string>());
    for (const auto& e : j.at("entries"))
        a.entries.push_back({e.at(0).get<int>(), e.at(1).get<std::string>(), interval_from_json(e.at(2))});
    a.p = j.at("window").at(0).get<Rank>();
    a.q = j.at("window").at(1).get<Rank>();
    a.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("certificate")) {
        const auto& c = j.at("certificate");
        for (const auto& k : c.at("kinds"))
            a.cert.kinds.push_back(parse_kind(k.get<std::string>()));
        a.cert.sequence = parse_bigint(c.at("sequence").get<std::string>());
        a.cert.positions = c.at("positions").get<std::vector<long>>();
    }
    return a;
}

nlohmann::json to_json(const GammaNode& g)
{
    nlohmann::json r;
    r["variant"] = to_string(g.variant);
    r["rank"] = g.rank;
    if (g.variant != Variant::Base) {
        r["j"] = g.j;
        if (g.variant == Variant::Succ)
            r["pred"] = g.pred;
        r["avg"] = to_json(g.avg);
    }
    return r;
}

GammaNode node_from_json(const nlohmann::json& j)
{
    GammaNode g;
    g.variant = parse_variant(j.at("variant").get<std::string>());
    g.rank = j.at("rank").get<Rank>();
    if (g.variant != Variant::Base) {
        g.j = j.at("j").get<long>();
        if (g.variant == Variant::Succ)
            g.pred = j.at("pred").get<std::string>();
        g.avg = average_from_json(j.at("avg"));
    }
    return g;
}

nlohmann::json to_json(const BlockVector& x)
{
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [id, c] : x.coeffs)
        r[id] = to_string(c);
    return r;
}

BlockVector vector_from_json(const nlohmann::json& j)
{
    BlockVector x;
    for (auto it = j.begin(); it != j.end(); ++it)
        x.add(it.key(), parse_rational(it.value().get<std::string>()));
    return x;
}

std::string canonical_content(const GammaNode& g)
{
    std::ostringstream os;
    os << to_string(g.variant) << '|' << g.rank;
    if (g.variant == Variant::Base)
        return os.str();
    os << '|' << g.j << '|' << (g.variant == Variant::Succ ? g.pred : std::string("-"));
    os << '|' << g.avg.size.get_str();
    for (const auto& e : g.avg.entries) {
        os << '|' << e.sign << ':' << e.node << ':' << e.E.lo << ',';
        if (e.E.hi == kRankInf)
            os << "inf";
        else
            os << e.E.hi;
    }
    return os.str();
}

NodeId content_id(const GammaNode& g)
{
    std::string s = canonical_content(g);
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), md);
    char hex[17];
    for (int i = 0; i < 8; ++i)
        std::snprintf(hex + 2 * i, 3, "%02x", md[i]);
    return std::string(hex, 16);
}

}
