#pragma once

#include "bdlab/schedule.hpp"
#include "bdlab/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bdlab {

class IllegalNode : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownNode : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SpaceTag { Bmt, Xnr, Quotient, Generic };
std::string to_string(SpaceTag t);
SpaceTag parse_space_tag(const std::string& s);

// 𝒩_{q+1} = (2^q · #Γ̄_q)!, with #Γ̄_q the registered count. Divisibility always uses
// the registered factorial; growth thresholds s ≥ 𝒩 follow the policy.
struct ThresholdPolicy {
    enum class Kind { Factorial, Explicit };
    Kind kind = Kind::Explicit;
    std::map<Rank, BigInt> values;
    BigInt fallback = 1;

    std::string name() const { return kind == Kind::Factorial ? "factorial" : "explicit"; }
    nlohmann::json to_json() const;
    static ThresholdPolicy from_json(const nlohmann::json& j);
    static ThresholdPolicy factorial() { return {Kind::Factorial, {}, 1}; }
    static ThresholdPolicy toy() { return {Kind::Explicit, {}, 1}; }
};

// sparse row of coordinates e*_γ(d_ξ) keyed by dense node index, sorted
using SparseRow = std::vector<std::pair<std::uint32_t, Rational>>;

class SpaceStage {
public:
    using Validator = std::function<void(const SpaceStage&, const GammaNode&)>;

    SpaceStage(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th, SpaceTag tag);

    void set_validator(Validator v) { validator_ = std::move(v); }

    NodeId register_node(const GammaNode& g);
    // skips the validator, used for quotient copies and replays of trusted dumps
    NodeId register_unchecked(const GammaNode& g);

    bool contains(const NodeId& id) const { return index_.count(id) != 0; }
    std::size_t index_of(const NodeId& id) const;
    const GammaNode& node(std::size_t idx) const { return nodes_[idx]; }
    const GammaNode& node(const NodeId& id) const { return nodes_[index_of(id)]; }
    const NodeId& id(std::size_t idx) const { return ids_[idx]; }
    Rank rank(std::size_t idx) const { return nodes_[idx].rank; }
    Rank rank_of(const NodeId& id) const { return nodes_[index_of(id)].rank; }
    long age(std::size_t idx) const { return ages_[idx]; }
    long age_of(const NodeId& id) const { return ages_[index_of(id)]; }

    std::size_t size() const { return nodes_.size(); }
    Rank max_rank() const { return by_rank_.empty() ? 0 : by_rank_.rbegin()->first; }
    std::size_t count_up_to(Rank q) const;
    // indices of nodes with rank ≤ Q in (rank, registration) order
    std::vector<std::size_t> indices_up_to(Rank Q) const;
    const std::vector<std::size_t>& at_rank(Rank r) const;
    std::vector<Rank> ranks() const;

    const WeightSchedule& schedule() const { return *ws_; }
    std::shared_ptr<const WeightSchedule> schedule_ptr() const { return ws_; }
    const ThresholdPolicy& thresholds() const { return th_; }
    SpaceTag tag() const { return tag_; }

    const SparseRow& row(std::size_t idx) const { return rows_[idx]; }
    Rational coordinate(const NodeId& gamma, const NodeId& xi) const;
    Rational coordinate(std::size_t g, std::size_t x) const;
    // recomputes e*_γ(d_ξ) from the node definitions without touching the row cache
    Rational coordinate_uncached(const NodeId& gamma, const NodeId& xi) const;

    // n | 𝒩_{q1}
    bool divides_threshold(const BigInt& n, Rank q1) const;
    // s ≥ 𝒩_{q1} under the growth policy
    bool meets_threshold(const BigInt& s, Rank q1) const;

private:
    void compute_row(std::size_t idx);

    std::shared_ptr<const WeightSchedule> ws_;
    ThresholdPolicy th_;
    SpaceTag tag_;
    Validator validator_;

    std::vector<GammaNode> nodes_;
    std::vector<NodeId> ids_;
    std::vector<long> ages_;
    std::vector<std::string> contents_;
    std::vector<SparseRow> rows_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::map<Rank, std::vector<std::size_t>> by_rank_;
};

// the c*_γ part of e*_γ as a functional
DualFunctional c_star(const SpaceStage& st, const NodeId& gamma);
DualFunctional d_star(const SpaceStage& st, const NodeId& gamma);
DualFunctional e_star(const NodeId& gamma, Interval E = Interval::all());

Rational evaluate(const SpaceStage& st, const DualFunctional& f, const BlockVector& x);
Rational evaluate_atom(const SpaceStage& st, const NodeId& gamma, const Interval& E,
    const BlockVector& x);

BlockVector project(const SpaceStage& st, const BlockVector& x, const Interval& E);

Rank min_supp(const SpaceStage& st, const BlockVector& x);
Rank max_supp(const SpaceStage& st, const BlockVector& x);
Interval ran(const SpaceStage& st, const BlockVector& x);

// x as a dense-index sorted list
SparseRow dense(const SpaceStage& st, const BlockVector& x);

struct HorizonNorm {
    Rational lower;
    Rational upper;
    // index of a γ attaining the lower bound, -1 for zero
    long argmax = -1;
};

HorizonNorm horizon_norm(const SpaceStage& st, const BlockVector& x, Rank Q);
HorizonNorm horizon_norm(const SpaceStage& st, const BlockVector& x);

// sup over all intervals E of |e*_γ∘P_E(x)|
Rational sup_over_intervals(const SpaceStage& st, std::size_t gamma, const SparseRow& x);

struct ExtensionReport {
    Rank q = 0;
    Rank Q = 0;
    Rational max_mass;
    long argmax = -1;
    std::size_t rows = 0;
    bool pass() const { return max_mass <= 2; }
};

ExtensionReport check_extension_bound(const SpaceStage& st, Rank q, Rank Q);
// ℓ₁ mass of γ's row of r_γ∘i_q
Rational extension_row_mass(const SpaceStage& st, std::size_t gamma, Rank q);

}
