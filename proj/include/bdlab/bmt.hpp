#pragma once

#include "bdlab/stage.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bdlab {

struct Verdict {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
    static Verdict yes() { return {true, {}}; }
    static Verdict no(std::string r) { return {false, std::move(r)}; }
};

class InvalidAverage : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// shape, window and coefficient clauses of Δ̄_{q+1}
Verdict is_legal_bmt_node(const SpaceStage& st, const GammaNode& g);

// invariants that do not need a stage: d ≤ n, successive intervals, p < min E_1, max E_d ≤ q
AlphaAverage make_alpha_average(std::vector<AverageEntry> entries, const BigInt& n, Rank p,
    Rank q, AvgKind kind_hint = AvgKind::Plain);
// the stage-dependent invariants (Basic shape, decreasing weights, rank ≥ min E, n | 𝒩_{q+1})
Verdict check_alpha_average(const SpaceStage& st, const AlphaAverage& a);

// b* = (1/n) Σ ε_i d*_{γ_i} over nodes with strictly increasing ranks
AlphaAverage basic_average(const SpaceStage& st, const std::vector<std::pair<int, NodeId>>& terms,
    const BigInt& n, Rank p, Rank q);

DualFunctional as_functional(const AlphaAverage& a);
Rational evaluate(const SpaceStage& st, const AlphaAverage& a, const BlockVector& x);
// b*∘P_E
AlphaAverage restrict_average(const AlphaAverage& a, const Interval& E);

// min/max of the entry intervals (clipped to the window)
Interval average_range(const AlphaAverage& a);

struct VfgResult {
    bool vfg = false;
    bool sizes_increasing = false;
    std::vector<std::pair<Rank, Rank>> windows;
    std::string reason;
};

VfgResult is_very_fast_growing(const SpaceStage& st, const std::vector<AlphaAverage>& seq);

// stage whose validator enforces the Δ̄ recursion
SpaceStage make_bmt_stage(std::shared_ptr<const WeightSchedule> ws, ThresholdPolicy th);
// node constructors
GammaNode base_node();
GammaNode age_one(Rank rank, long j, AlphaAverage avg);
GammaNode succ(Rank rank, const NodeId& pred, long j, AlphaAverage avg);
// the canonical AgeOne(rank, j=1, d̄*_0)
GammaNode canonical_node(const SpaceStage& st, Rank rank, long j = 1);

}
