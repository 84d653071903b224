#pragma once

#include "bdlab/report.hpp"
#include "bdlab/xnr.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bdlab {

// successive sets F with #F ≤ min F, greedily #F = min F (optionally capped)
std::vector<std::vector<long>> schreier1_partition(long start, long count, long cap = 0);

// a block family whose members occupy a single rank each: rank -> (x, normer η)
struct SourceFamily {
    std::string name;
    std::function<std::pair<BlockVector, NodeId>(XnrSpace&, Rank)> make;
};

SourceFamily basis_family(long weight_index = 1);

// basis-built family with one free rank after each block, normers d*_η (b*_k(x_k) = 1)
struct NormedBlocks {
    std::vector<BlockVector> blocks;
    std::vector<NodeId> normers;
};

NormedBlocks basis_blocks(XnrSpace& sp, const SourceFamily& fam, Rank start, long count,
    Rank stride = 2);

// sets p_r, q_r so that b*_r ∈ B_{p_{r-1}, p_r - 1}; throws on support collision
void assign_windows(const SpaceStage& st, std::vector<AlphaAverage>& seq, Rank p0);

struct LowerCertificate {
    NodeId gamma;
    BlockVector x;
    Rational value;
    Rational bound;
};

// ‖Σ λ_i x_{k_i}‖ ≥ θ (1/m_j) Σ|λ_i| witnessed by a γ built on the signed normers
LowerCertificate l1_lower_certificate(XnrSpace& sp, const NormedBlocks& fam,
    const std::vector<long>& picks, const std::vector<Rational>& lambda, long j);

struct L1Average {
    BlockVector y;
    std::vector<BlockVector> blocks;
    NodeId witness;
    Rational certified;
    Rational scale;
    Rational lower;
};

L1Average build_l1_average(XnrSpace& sp, const NormedBlocks& fam, long first, const Rational& C,
    long n, long j);

struct AlphaProfile {
    std::vector<BigInt> sizes;
    // table[k][s] = max over pool averages of size ≥ sizes[s] and intervals E of |b*(P_E x_k)|
    std::vector<std::vector<Rational>> table;
    // smallest k0 (per size threshold) from which all entries are < ε, -1 when none
    std::vector<long> zero_from(const Rational& eps) const;
    std::string csv() const;
};

AlphaProfile alpha_profile(const SpaceStage& st, const std::vector<BlockVector>& xs,
    const std::vector<AlphaAverage>& pool);
// sup over intervals E of |b*(P_E x)|
Rational sup_average_over_intervals(const SpaceStage& st, const AlphaAverage& b,
    const BlockVector& x);
// the α_c averages carried by registered nodes of `gamma`
std::vector<AlphaAverage> standard_pool(const SpaceStage& st, const SubsetSpec& gamma,
    const BigInt& min_size = 1);

struct RISWitness {
    std::vector<BlockVector> vectors;
    Rational C;
    std::vector<long> j;
};

RISWitness build_ris(const SpaceStage& st, const std::vector<BlockVector>& source,
    const Rational& C, Rank Q);
Report check_ris(const SpaceStage& st, const RISWitness& w, Rank Q);
Report verify_ris_estimates(const SpaceStage& st, const SubsetSpec& gamma, const RISWitness& w,
    long j, const std::vector<AlphaAverage>& submitted = {});

struct ExactPair {
    NodeId gamma;
    BlockVector x;
    Rational C;
    Rational theta;
    long j = 1;
    long windows = 0;
    std::vector<std::vector<long>> groups;
    std::vector<Rational> lambda;
};

struct ExactPairParams {
    long j = 1;
    Rational C = 3584;
    Rational theta = 1;
    long window_cap = 4;
    long group_cap = 4;
    long windows = 0;
    long start_index = 1;
};

// windows N used for weight j: ⌈θ n_j / C⌉ ≤ N ≤ n_j
long exact_pair_windows(const WeightSchedule& ws, const ExactPairParams& p);

// sources must have a free rank after each 𝒮₁ group; see exact_pair_layout
ExactPair build_exact_pair(XnrSpace& sp, const ExactPairParams& p,
    const std::vector<BlockVector>& sources, const std::vector<NodeId>& normers);

// registers sources of `fam` from rank ≥ start with a free rank after each group
NormedBlocks exact_pair_layout(XnrSpace& sp, const SourceFamily& fam, const ExactPairParams& p,
    Rank start);

Report check_exact_pair(const SpaceStage& st, const SubsetSpec& gamma, const ExactPair& ep);

// ρ ∈ [0, θ]: an interval E with |e*_γ∘P_E(x) − ρ| < 2C m_j/n_j
Interval rho_interval(const SpaceStage& st, const ExactPair& ep, const Rational& rho);

struct DependentSequence {
    std::vector<ExactPair> pairs;
    BigInt special;
    Rational C;
    Rational theta;
};

struct DependentParams {
    long length = 4;
    Rational C = 3584;
    Rational theta = 1;
    long window_cap = 4;
    long group_cap = 4;
};

DependentSequence build_dependent_sequence(XnrSpace& sp, const DependentParams& p,
    const std::vector<SourceFamily>& families);

Report verify_dependent_estimates(XnrSpace& sp, const DependentSequence& ds);

struct Blowup {
    NodeId gamma;
    BlockVector sum;
    Rational value;
    Rational expected;
    long a = 0;
};

enum class BlowupPattern { Alternating, Subset };

Blowup blowup_witness(XnrSpace& sp, const DependentSequence& ds, long j, BlowupPattern pattern,
    const std::vector<long>& subset = {}, long upto = 0, long window = 1);

Report hi_witness(XnrSpace& sp, const DependentSequence& ds, long j);

// c₀ spreading-model estimate over the registered population
struct C0Result {
    Rational worst_ratio;
    std::size_t functionals = 0;
    std::size_t sets = 0;
    std::size_t violations = 0;
    std::string witness;
};

// sup over λ ∈ [−1,1]^n and intervals E of |e*_γ∘P_E(Σ λ_i d_{γ_{k_i}})| against C/m_j, for
// n ≤ k_1 < … < k_n (1-based, n ≤ nmax) and γ of weight m_j⁻¹ with j < j_n = js[n];
// worst_ratio is the largest m_j·value seen
C0Result c0_estimate(const SpaceStage& st, const std::vector<NodeId>& basis,
    const std::vector<long>& js, const Rational& C, long nmax = 4);

}
