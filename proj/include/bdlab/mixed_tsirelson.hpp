#pragma once

#include "bdlab/schedule.hpp"

#include <json.hpp>

#include <utility>
#include <vector>

namespace bdlab {

using AuxVector = std::vector<Rational>;

constexpr std::size_t kMtMaxLength = 128;

struct MtNorm {
    Rational value;
    // weights j > jmax can add at most this much
    Rational tail_bound;
};

// norm of T[(𝒜_{k n_j}, m_j⁻¹)_{j ≤ jmax}] by interval DP
MtNorm mt_norm(const WeightSchedule& ws, int k, const AuxVector& x, long jmax);

// (1/m_j) Σ_r max_{i∈E_r} |x_i| for successive intervals (1-based, inclusive) with 2 ≤ d ≤ k n_j
Rational mt_functional(const WeightSchedule& ws, int k, const AuxVector& x, long j,
    const std::vector<std::pair<std::size_t, std::size_t>>& pieces);

struct SccRow {
    long k;
    Rational norm;
    Rational tail;
    Rational upper;
    Rational lower;
    bool pass;
};

struct SccReport {
    long j;
    std::vector<SccRow> rows;
    bool pass() const;
    nlohmann::json to_json() const;
};

// mt_norm((m_j/n_j) Σ_{i≤k} e_i) ≤ k/n_j + 1/m_j, plus the singleton-split lower bound k/n_j
SccReport check_scc_lemma(const WeightSchedule& ws, long j, long up_to_k, int k_factor = 4);

AuxVector aux_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AuxVector& x);

}
