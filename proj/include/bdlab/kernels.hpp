#pragma once

#include "bdlab/stage.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace bdlab::kernels {

struct MaxResult {
    Rational value;
    long argmax = -1;
};

// max over γ in `gammas` of |e*_γ(x)|; ties resolve to the earliest position
MaxResult horizon_lower_serial(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    const SparseRow& x);
MaxResult horizon_lower_parallel(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    const SparseRow& x);

MaxResult extension_masses_serial(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    Rank q);
MaxResult extension_masses_parallel(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    Rank q);

// first (η, γ) in (η order, γ order) with η ∈ inside, γ ∈ outside and e*_η(d_γ) ≠ 0
using Pair = std::pair<std::size_t, std::size_t>;
std::optional<Pair> vanishing_violation_serial(const SpaceStage& st,
    const std::vector<std::size_t>& inside, const std::vector<char>& member);
std::optional<Pair> vanishing_violation_parallel(const SpaceStage& st,
    const std::vector<std::size_t>& inside, const std::vector<char>& member);

Rational dot(const SparseRow& row, const SparseRow& x);

}
