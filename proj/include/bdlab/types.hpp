#pragma once

#include "bdlab/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdlab {

using NodeId = std::string;
using Rank = std::int64_t;

constexpr Rank kRankInf = std::numeric_limits<Rank>::max();

struct Interval {
    Rank lo = 1;
    Rank hi = kRankInf;

    bool empty() const { return lo > hi; }
    bool contains(Rank r) const { return lo <= r && r <= hi; }
    static Interval all() { return {1, kRankInf}; }
    static Interval point(Rank r) { return {r, r}; }
    Interval intersect(const Interval& o) const
    {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
    bool operator==(const Interval&) const = default;
};

enum class Variant { Base, AgeOne, Succ };
enum class AvgKind { Plain, Basic, IC, CO, IR };

std::string to_string(Variant v);
std::string to_string(AvgKind k);
AvgKind parse_kind(const std::string& s);
Variant parse_variant(const std::string& s);

struct AverageEntry {
    int sign = 1;
    NodeId node;
    Interval E;
    bool operator==(const AverageEntry&) const = default;
};

struct Certificate {
    std::vector<AvgKind> kinds;
    // σ-value of the special sequence used for CO/IR, 0 when none
    BigInt sequence;
    std::vector<long> positions;
};

struct AlphaAverage {
    BigInt size = 1;
    std::vector<AverageEntry> entries;
    Rank p = 0;
    Rank q = 0;
    AvgKind kind = AvgKind::Plain;
    Certificate cert;

    std::size_t d() const { return entries.size(); }
};

struct GammaNode {
    Variant variant = Variant::Base;
    Rank rank = 1;
    long j = 0;
    NodeId pred;
    AlphaAverage avg;
};

struct BlockVector {
    std::map<NodeId, Rational> coeffs;

    bool zero() const { return coeffs.empty(); }
    void add(const NodeId& id, const Rational& c);
    BlockVector& operator+=(const BlockVector& o);
    BlockVector scaled(const Rational& c) const;
};

BlockVector unit_vector(const NodeId& id);
BlockVector operator+(const BlockVector& a, const BlockVector& b);
BlockVector operator-(const BlockVector& a, const BlockVector& b);

struct Term {
    Rational coef;
    NodeId node;
    Interval E;
};

struct DualFunctional {
    std::vector<Term> terms;

    void add(const Rational& c, const NodeId& id, Interval E = Interval::all())
    {
        terms.push_back({c, id, E});
    }
    DualFunctional& operator+=(const DualFunctional& o);
    DualFunctional scaled(const Rational& c) const;
};

nlohmann::json to_json(const Interval& e);
Interval interval_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AlphaAverage& a);
AlphaAverage average_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GammaNode& g);
GammaNode node_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BlockVector& x);
BlockVector vector_from_json(const nlohmann::json& j);

// canonical serialization of the functional content of a node (hashed into its id)
std::string canonical_content(const GammaNode& g);
NodeId content_id(const GammaNode& g);

}
