#pragma once

#include "bdlab/stage.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bdlab {

struct SubsetSpec {
    std::string tag;
    std::set<NodeId> members;

    bool contains(const NodeId& id) const { return members.count(id) != 0; }
    // Γ′_q ids grouped by rank, restricted to the stage and rank ≤ Q
    std::map<Rank, std::vector<NodeId>> trace(const SpaceStage& st, Rank Q) const;
    // S = ranks with Δ′_q ≠ ∅, increasing
    std::vector<Rank> S(const SpaceStage& st, Rank Q) const;

    nlohmann::json to_json(const SpaceStage& st) const;
    static SubsetSpec from_json(const nlohmann::json& j);
};

SubsetSpec full_subset(const SpaceStage& st, std::string tag = "full");
// smallest superset of `seeds` closed under pred and average references
SubsetSpec reference_closure(const SpaceStage& st, const std::set<NodeId>& seeds,
    std::string tag);

struct SelfDetVerdict {
    Rank Q = 0;
    bool d = true;
    bool b = true;
    bool e = true;
    bool complete = false;
    // (η, γ): η ∈ Γ′, γ ∉ Γ′ with e*_η(d_γ) ≠ 0
    std::optional<std::pair<NodeId, NodeId>> witness;
    Rank failing_rank_b = 0;

    bool agree() const { return d == b && b == e; }
    bool self_determined() const { return d && agree(); }
    nlohmann::json to_json() const;
};

SelfDetVerdict check_self_determined(const SpaceStage& st, const SubsetSpec& sub, Rank Q,
    bool complete = false);

struct Quotient {
    SpaceStage stage;
    std::map<NodeId, NodeId> to_quotient;
    std::map<NodeId, NodeId> from_quotient;
    std::vector<Rank> S;

    Interval map_interval(const Interval& E) const;
    Rank map_rank(Rank q) const;
};

class UnverifiedSubset : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// requires Γ′ self-determined up to the stage's max rank and closed under references
Quotient quotient_stage(const SpaceStage& st, const SubsetSpec& sub);
BlockVector restrict(const SpaceStage& st, const Quotient& qt, const BlockVector& x);

struct SuiteItem {
    std::string name;
    bool pass = true;
    std::string witness;
    long checked = 0;
};

struct Section1Report {
    std::string tag;
    Rank Q = 0;
    SelfDetVerdict verdict;
    std::vector<SuiteItem> items;
    bool pass() const;
    nlohmann::json to_json() const;
};

Section1Report verify_section1_suite(const SpaceStage& st, const SubsetSpec& sub, Rank Q,
    unsigned seed = 7);

// Σ a_ξ d_ξ with r_q(Σ a_ξ d_ξ) = e_η, over registered Γ_q; keyed by dense index
std::map<std::size_t, Rational> extend(const SpaceStage& st, std::size_t eta, Rank q);

}
