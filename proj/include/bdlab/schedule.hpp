#pragma once

#include "bdlab/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bdlab {

enum class Mode { Toy, Strict };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct NRule {
    enum class Kind { Power, List };
    Kind kind = Kind::Power;
    // n_j = coef * base^(exponent*j)
    long coef = 1;
    long base = 8;
    long exponent = 2;
    std::vector<BigInt> values;
};

class WeightSchedule {
public:
    WeightSchedule(long base, NRule rule, Mode mode, long depth);

    long base() const { return base_; }
    Mode mode() const { return mode_; }
    long depth() const { return depth_; }
    const NRule& rule() const { return rule_; }

    BigInt m(long j) const;
    BigInt n(long j) const;
    Rational inv_m(long j) const;

    // exact closed forms of the tail sums
    Rational sum_inv_m() const;
    Rational tail_inv_m(long i) const;

    nlohmann::json to_json() const;

private:
    long base_;
    NRule rule_;
    Mode mode_;
    long depth_;
};

WeightSchedule make_schedule(long base, NRule rule, Mode mode, long depth = 16);
WeightSchedule schedule_from_json(const nlohmann::json& j);

// base 8, n_j = 8^(2j)
WeightSchedule toy_schedule_t1(long depth = 16);

struct LacunarityItem {
    char item;
    long i;
    long j;
    Rational lhs;
    Rational rhs;
    std::string relation;
    bool pass;
    bool binding;
};

struct LacunarityReport {
    Mode mode;
    long depth;
    std::vector<LacunarityItem> items;
    bool all_pass() const;
    bool binding_pass() const;
    nlohmann::json to_json() const;
};

LacunarityReport validate_strict(const WeightSchedule& ws, long depth);

}
