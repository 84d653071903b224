#pragma once

#include "bdlab/rational.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace bdlab::linalg {

using Row = std::map<std::uint32_t, Rational>;

// rank of a list of sparse rows by exact Gaussian elimination
std::size_t rank(std::vector<Row> rows);

// true iff v lies in the row span of `rows`
bool in_span(const std::vector<Row>& rows, const Row& v);

class Echelon {
public:
    // reduces v against the basis; returns true if v was independent (and keeps it)
    bool insert(Row v);
    Row reduce(Row v) const;
    std::size_t rank() const { return pivots_.size(); }

private:
    std::map<std::uint32_t, Row> pivots_;
};

}
