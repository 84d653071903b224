#include "bdlab/linalg.hpp"

namespace bdlab::linalg {

Row Echelon::reduce(Row v) const
{
    // pivot rows are in reduced echelon form, so one pass clears every pivot column
    std::vector<std::pair<const Row*, Rational>> hits;
    for (const auto& [k, a] : v) {
        auto p = pivots_.find(k);
        if (p != pivots_.end())
            hits.emplace_back(&p->second, a);
    }
    for (const auto& [row, c] : hits)
        for (const auto& [k, a] : *row)
            v[k] -= c * a;
    for (auto it = v.begin(); it != v.end();) {
        if (it->second == 0)
            it = v.erase(it);
        else
            ++it;
    }
    return v;
}

bool Echelon::insert(Row v)
{
    v = reduce(std::move(v));
    if (v.empty())
        return false;
    auto lead = v.begin()->first;
    Rational inv = 1 / v.begin()->second;
    for (auto& [k, a] : v)
        a *= inv;
    // keep existing pivot rows free of the new pivot column
    for (auto& [pk, row] : pivots_) {
        auto f = row.find(lead);
        if (f == row.end())
            continue;
        Rational c = f->second;
        for (const auto& [k, a] : v) {
            Rational& slot = row[k];
            slot -= c * a;
        }
        for (auto jt = row.begin(); jt != row.end();) {
            if (jt->second == 0)
                jt = row.erase(jt);
            else
                ++jt;
        }
    }
    pivots_.emplace(lead, std::move(v));
    return true;
}

std::size_t rank(std::vector<Row> rows)
{
    Echelon e;
    for (auto& r : rows)
        e.insert(std::move(r));
    return e.rank();
}

bool in_span(const std::vector<Row>& rows, const Row& v)
{
    Echelon e;
    for (const auto& r : rows)
        e.insert(r);
    Row w = v;
    for (auto it = w.begin(); it != w.end();) {
        if (it->second == 0)
            it = w.erase(it);
        else
            ++it;
    }
    return e.reduce(std::move(w)).empty();
}

}
