#pragma once

#include "bdlab/bmt.hpp"
#include "bdlab/selfdet.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bdlab {

// one element of 𝒬: {(γ_k, x_k)}_{k=1}^n
using QElement = std::vector<std::pair<NodeId, BlockVector>>;

std::string canonical_q(const QElement& s);

class InvalidQElement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CodingRegistry {
public:
    explicit CodingRegistry(Mode mode) : mode_(mode) {}
    CodingRegistry(const CodingRegistry& o);
    CodingRegistry& operator=(const CodingRegistry& o);

    Mode mode() const { return mode_; }

    BigInt sigma_register(const SpaceStage& st, const QElement& s);
    std::optional<BigInt> sigma(const QElement& s) const;
    std::optional<QElement> preimage(const BigInt& v) const;
    bool in_image(const BigInt& v) const { return by_value_.count(v) != 0; }

    // weight index the special-sequence rule assigns after the prefix s (σ(s)), as long
    long weight_after(const SpaceStage& st, const QElement& prefix);

    // special sequence check: we(γ_1) = m_1⁻¹, we(γ_k) = m_{σ(prefix)}⁻¹
    bool is_special(const SpaceStage& st, const QElement& s) const;
    // registered special sequences (as σ-values), in registration order
    std::vector<BigInt> special_sequences(const SpaceStage& st) const;

    std::size_t size() const { return log_.size(); }

    void save(const std::string& path) const;
    static CodingRegistry load(const std::string& path);
    std::string dump() const;

private:
    struct Record {
        std::string key;
        QElement element;
        BigInt value;
    };

    Mode mode_;
    std::vector<Record> log_;
    std::map<std::string, std::size_t> by_key_;
    std::map<BigInt, std::size_t> by_value_;
    mutable std::mutex write_;
};

// i, j incomparable: neither σ-preimage is a prefix of the other; mixed case counts as comparable
bool incomparable(const CodingRegistry& reg, const BigInt& i, const BigInt& j);

struct PairList {
    std::vector<std::pair<NodeId, Interval>> pairs;
    std::vector<int> signs;
    BigInt n = 1;
};

struct Classification {
    bool ic = false;
    bool co = false;
    bool ir = false;
    Certificate co_cert;
    Certificate ir_cert;
    std::vector<AvgKind> kinds() const;
};

// throws InvalidAverage when weights are not strictly decreasing, rank(γ_i) < min E_i, or d > n
Classification classify_pairs(const SpaceStage& st, const CodingRegistry& reg, const PairList& pl);

struct Homogeneous {
    std::vector<std::size_t> indices;
    AvgKind kind = AvgKind::Plain;
};

Homogeneous select_homogeneous(const SpaceStage& st, const CodingRegistry& reg,
    const std::vector<std::pair<NodeId, Interval>>& pairs);

// Γ̄ stage plus the Γ membership set of the conditional space
class XnrSpace {
public:
    XnrSpace(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th, Mode coding);

    SpaceStage& stage() { return stage_; }
    const SpaceStage& stage() const { return stage_; }
    CodingRegistry& registry() { return reg_; }
    const CodingRegistry& registry() const { return reg_; }

    Verdict is_legal(const GammaNode& g) const;
    // registers into Γ̄ and Γ; throws IllegalNode naming the violated clause
    NodeId admit(GammaNode g);
    // registers into Γ̄ only (legal for 𝔅_mT, not necessarily in Γ)
    NodeId admit_bar(const GammaNode& g);
    bool in_gamma(const NodeId& id) const { return gamma_.count(id) != 0; }
    SubsetSpec gamma() const;
    NodeId base();
    NodeId canonical(Rank r, long j = 1);

    // attaches the α_c certificate (Basic or IC/CO/IR) when one exists
    AlphaAverage certify(AlphaAverage a) const;

private:
    SpaceStage stage_;
    CodingRegistry reg_;
    std::set<NodeId> gamma_;
};

Verdict is_legal_xnr_node(const SpaceStage& st, const CodingRegistry& reg,
    const std::set<NodeId>& gamma, const GammaNode& g);

struct AnalysisStep {
    NodeId xi;
    AlphaAverage b;
};

struct EvaluationAnalysis {
    NodeId gamma;
    long j = 0;
    std::vector<AnalysisStep> steps;

    // Σ_r d*_{ξ_r} + (1/m_j) Σ_r b*_r
    DualFunctional functional(const SpaceStage& st) const;
    // e*_{ξ_t} + Σ_{r>t} d*_{ξ_r} + (1/m_j) Σ_{r>t} b*_r, t 1-based
    DualFunctional partial(const SpaceStage& st, std::size_t t) const;
};

EvaluationAnalysis evaluation_analysis(const SpaceStage& st, const NodeId& gamma);

struct AnalysisCheck {
    bool exact = true;
    bool vfg = true;
    bool windows = true;
    std::size_t vectors = 0;
    std::string witness;
};

// residual of the reconstruction against every registered d_η of rank ≤ rank(γ)
AnalysisCheck verify_evaluation_analysis(const SpaceStage& st, const NodeId& gamma);

NodeId build_gamma_from_vfg(XnrSpace& sp, long j, const std::vector<AlphaAverage>& vfg);

std::vector<NodeId> ramsey_basis_select(const SpaceStage& st, const std::vector<NodeId>& gammas);

}
