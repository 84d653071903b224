#include "bdlab/mixed_tsirelson.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdlab {

namespace {

long usable_weights(const WeightSchedule& ws, long jmax)
{
    if (ws.rule().kind == NRule::Kind::List)
        return std::min<long>(jmax, static_cast<long>(ws.rule().values.size()));
    return jmax;
}

}

MtNorm mt_norm(const WeightSchedule& ws, int k, const AuxVector& x, long jmax)
{
    if (jmax < 1)
        throw std::invalid_argument("jmax must be ≥ 1");
    if (k < 1)
        throw std::invalid_argument("k must be positive");
    // trim zero ends, they never change the norm
    std::size_t first = 0, last = x.size();
    while (first < last && x[first] == 0)
        ++first;
    while (last > first && x[last - 1] == 0)
        --last;
    const std::size_t L = last - first;
    if (L > kMtMaxLength)
        throw std::invalid_argument("support too long for the interval DP");
    MtNorm out;
    if (L == 0)
        return out;

    std::vector<Rational> a(L);
    Rational l1 = 0;
    for (std::size_t i = 0; i < L; ++i) {
        a[i] = abs_q(x[first + i]);
        l1 += a[i];
    }
    const long J = usable_weights(ws, jmax);
    if (ws.rule().kind == NRule::Kind::Power || J < static_cast<long>(ws.rule().values.size()))
        out.tail_bound = l1 * ws.inv_m(J + 1);

    // piece limits k·n_j capped at L, and the inverse weights
    std::vector<std::size_t> limit(J + 1);
    std::vector<Rational> theta(J + 1);
    for (long j = 1; j <= J; ++j) {
        BigInt lim = ws.n(j) * k;
        limit[j] = lim >= BigInt(static_cast<unsigned long>(L)) ? L : lim.get_ui();
        theta[j] = ws.inv_m(j);
    }
    // weights whose limit can bind somewhere
    std::vector<long> constrained;
    for (long j = 1; j <= J; ++j)
        if (limit[j] < L)
            constrained.push_back(j);

    // N[a][b] for a ≤ b, filled with a descending
    std::vector<std::vector<Rational>> N(L, std::vector<Rational>(L));
    std::vector<Rational> U1(L);
    for (std::size_t s = L; s-- > 0;) {
        // G[c][t][b]: best split of [s,b] into ≤ t+1 pieces for constrained weight c
        std::vector<std::vector<std::vector<Rational>>> Gc(constrained.size());
        for (std::size_t c = 0; c < constrained.size(); ++c)
            Gc[c].assign(limit[constrained[c]], std::vector<Rational>(L));
        Rational mx = 0;
        for (std::size_t b = s; b < L; ++b) {
            mx = std::max(mx, a[b]);
            std::size_t len = b - s + 1;
            Rational best = mx;
            // unconstrained split into ≥ 2 pieces
            Rational u2 = 0;
            for (std::size_t t = s; t < b; ++t)
                u2 = std::max(u2, Rational(U1[t] + N[t + 1][b]));
            long j0 = 0;
            for (long j = 1; j <= J; ++j)
                if (limit[j] >= len) {
                    j0 = j;
                    break;
                }
            if (len >= 2 && j0 != 0)
                best = std::max(best, Rational(theta[j0] * u2));
            for (std::size_t c = 0; c < constrained.size(); ++c) {
                long j = constrained[c];
                std::size_t lim = limit[j];
                if (lim >= len || lim < 2)
                    continue;
                Rational v = 0;
                for (std::size_t t = s; t < b; ++t)
                    v = std::max(v, Rational(Gc[c][lim - 2][t] + N[t + 1][b]));
                best = std::max(best, Rational(theta[j] * v));
            }
            N[s][b] = best;
            U1[b] = std::max(best, u2);
            for (std::size_t c = 0; c < constrained.size(); ++c) {
                auto& g = Gc[c];
                g[0][b] = best;
                for (std::size_t t = 1; t < g.size(); ++t) {
                    Rational v = g[t - 1][b];
                    for (std::size_t r = s; r < b; ++r)
                        v = std::max(v, Rational(g[t - 1][r] + N[r + 1][b]));
                    g[t][b] = v;
                }
            }
        }
    }
    out.value = N[0][L - 1];
    return out;
}

Rational mt_functional(const WeightSchedule& ws, int k, const AuxVector& x, long j,
    const std::vector<std::pair<std::size_t, std::size_t>>& pieces)
{
    if (pieces.size() < 2 || BigInt(static_cast<unsigned long>(pieces.size())) > ws.n(j) * k)
        throw std::invalid_argument("piece count outside 2..k·n_j");
    Rational sum = 0;
    std::size_t prev = 0;
    for (const auto& [lo, hi] : pieces) {
        if (lo <= prev || hi < lo || hi > x.size())
            throw std::invalid_argument("pieces must be successive intervals inside 1..L");
        Rational m = 0;
        for (std::size_t i = lo; i <= hi; ++i)
            m = std::max(m, abs_q(x[i - 1]));
        sum += m;
        prev = hi;
    }
    return sum * ws.inv_m(j);
}

bool SccReport::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const SccRow& r) { return r.pass; });
}

nlohmann::json SccReport::to_json() const
{
    nlohmann::json out;
    out["j"] = j;
    out["pass"] = pass();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"k", r.k}, {"norm", to_string(r.norm)}, {"tail", to_string(r.tail)},
            {"upper", to_string(r.upper)}, {"lower", to_string(r.lower)}, {"pass", r.pass}});
    out["rows"] = arr;
    return out;
}

SccReport check_scc_lemma(const WeightSchedule& ws, long j, long up_to_k, int k_factor)
{
    SccReport rep;
    rep.j = j;
    if (BigInt(up_to_k) > ws.n(j))
        throw std::invalid_argument("up_to_k must be ≤ n_j");
    Rational c = make_q(ws.m(j), ws.n(j));
    for (long k = 1; k <= up_to_k; ++k) {
        AuxVector x(static_cast<std::size_t>(k), c);
        long jmax = std::max<long>(j + 2, 3);
        MtNorm nm = mt_norm(ws, k_factor, x, jmax);
        SccRow row;
        row.k = k;
        row.norm = nm.value;
        row.tail = nm.tail_bound;
        row.upper = make_q(BigInt(k), ws.n(j)) + ws.inv_m(j);
        if (k >= 2) {
            std::vector<std::pair<std::size_t, std::size_t>> pieces;
            for (long i = 1; i <= k; ++i)
                pieces.emplace_back(i, i);
            row.lower = mt_functional(ws, k_factor, x, j, pieces);
        } else {
            row.lower = c;
        }
        row.pass = row.norm + row.tail <= row.upper && row.lower <= row.norm;
        rep.rows.push_back(row);
    }
    return rep;
}

AuxVector aux_from_json(const nlohmann::json& j)
{
    AuxVector x;
    for (const auto& v : j)
        x.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<long>()));
    return x;
}

nlohmann::json to_json(const AuxVector& x)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : x)
        arr.push_back(to_string(v));
    return arr;
}

}
