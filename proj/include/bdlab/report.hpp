#pragma once

#include "bdlab/rational.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace bdlab {

enum class Rel { Le, Lt, Eq, Ge, Gt };

struct Check {
    std::string claim;
    Rational lhs;
    Rational rhs;
    Rel rel = Rel::Le;
    bool pass = false;
    std::string note;

    Rational margin() const;
    nlohmann::json to_json() const;
};

Check make_check(std::string claim, const Rational& lhs, Rel rel, const Rational& rhs,
    std::string note = {});
Check make_flag(std::string claim, bool ok, std::string note = {});

struct Report {
    std::string suite;
    nlohmann::json mode = nlohmann::json::object();
    std::vector<Check> checks;
    nlohmann::json extra = nlohmann::json::object();

    void add(Check c) { checks.push_back(std::move(c)); }
    void merge(const Report& other, const std::string& prefix = {});
    bool pass() const;
    std::size_t failures() const;
    nlohmann::json to_json() const;
};

}
