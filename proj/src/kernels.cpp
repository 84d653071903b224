#include "bdlab/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdlab::kernels {

Rational dot(const SparseRow& row, const SparseRow& x)
{
    Rational s = 0;
    auto a = row.begin();
    auto b = x.begin();
    while (a != row.end() && b != x.end()) {
        if (a->first < b->first)
            ++a;
        else if (b->first < a->first)
            ++b;
        else {
            s += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return s;
}

namespace {

// keeps the earliest position on ties so serial and parallel agree
void fold(MaxResult& acc, const Rational& v, long pos)
{
    if (acc.argmax < 0 || v > acc.value || (v == acc.value && pos < acc.argmax)) {
        acc.value = v;
        acc.argmax = pos;
    }
}

template <class F>
MaxResult max_serial(std::size_t n, F f)
{
    MaxResult acc;
    acc.value = 0;
    for (std::size_t i = 0; i < n; ++i)
        fold(acc, f(i), static_cast<long>(i));
    return acc;
}

template <class F>
MaxResult max_parallel(std::size_t n, F f)
{
    MaxResult acc;
    acc.value = 0;
#pragma omp parallel
    {
        MaxResult local;
        local.value = 0;
#pragma omp for schedule(dynamic, 16) nowait
        for (long i = 0; i < static_cast<long>(n); ++i)
            fold(local, f(static_cast<std::size_t>(i)), i);
#pragma omp critical(bdlab_max)
        {
            if (local.argmax >= 0)
                fold(acc, local.value, local.argmax);
        }
    }
    return acc;
}

MaxResult to_index(MaxResult r, const std::vector<std::size_t>& gammas)
{
    if (r.argmax >= 0)
        r.argmax = static_cast<long>(gammas[r.argmax]);
    return r;
}

}

MaxResult horizon_lower_serial(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    const SparseRow& x)
{
    return to_index(max_serial(gammas.size(),
                        [&](std::size_t i) { return abs_q(dot(st.row(gammas[i]), x)); }),
        gammas);
}

MaxResult horizon_lower_parallel(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    const SparseRow& x)
{
    return to_index(max_parallel(gammas.size(),
                        [&](std::size_t i) { return abs_q(dot(st.row(gammas[i]), x)); }),
        gammas);
}

MaxResult extension_masses_serial(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    Rank q)
{
    return to_index(max_serial(gammas.size(),
                        [&](std::size_t i) { return extension_row_mass(st, gammas[i], q); }),
        gammas);
}

MaxResult extension_masses_parallel(const SpaceStage& st, const std::vector<std::size_t>& gammas,
    Rank q)
{
    return to_index(max_parallel(gammas.size(),
                        [&](std::size_t i) { return extension_row_mass(st, gammas[i], q); }),
        gammas);
}

namespace {

std::optional<std::size_t> first_outside(const SpaceStage& st, std::size_t eta,
    const std::vector<char>& member)
{
    for (const auto& [k, c] : st.row(eta))
        if (!member[k] && c != 0)
            return k;
    return std::nullopt;
}

}

std::optional<Pair> vanishing_violation_serial(const SpaceStage& st,
    const std::vector<std::size_t>& inside, const std::vector<char>& member)
{
    for (std::size_t eta : inside)
        if (auto g = first_outside(st, eta, member))
            return Pair{eta, *g};
    return std::nullopt;
}

std::optional<Pair> vanishing_violation_parallel(const SpaceStage& st,
    const std::vector<std::size_t>& inside, const std::vector<char>& member)
{
    long best = -1;
    std::size_t best_g = 0;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < static_cast<long>(inside.size()); ++i) {
        auto g = first_outside(st, inside[i], member);
        if (g) {
#pragma omp critical(bdlab_vanish)
            {
                if (best < 0 || i < best) {
                    best = i;
                    best_g = *g;
                }
            }
        }
    }
    if (best < 0)
        return std::nullopt;
    return Pair{inside[best], best_g};
}

}
