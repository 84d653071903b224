#include "bdlab/report.hpp"

namespace bdlab {

namespace {

const char* rel_name(Rel r)
{
    switch (r) {
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Eq: return "==";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    }
    return "?";
}

bool holds(const Rational& a, Rel r, const Rational& b)
{
    switch (r) {
    case Rel::Le: return a <= b;
    case Rel::Lt: return a < b;
    case Rel::Eq: return a == b;
    case Rel::Ge: return a >= b;
    case Rel::Gt: return a > b;
    }
    return false;
}

}

Rational Check::margin() const
{
    switch (rel) {
    case Rel::Le:
    case Rel::Lt: return rhs - lhs;
    case Rel::Ge:
    case Rel::Gt: return lhs - rhs;
    case Rel::Eq: return -abs_q(lhs - rhs);
    }
    return 0;
}

nlohmann::json Check::to_json() const
{
    nlohmann::json j;
    j["claim"] = claim;
    j["lhs"] = to_string(lhs);
    j["rel"] = rel_name(rel);
    j["rhs"] = to_string(rhs);
    j["margin"] = to_string(margin());
    j["pass"] = pass;
    if (!note.empty())
        j["note"] = note;
    return j;
}

Check make_check(std::string claim, const Rational& lhs, Rel rel, const Rational& rhs,
    std::string note)
{
    Check c;
    c.claim = std::move(claim);
    c.lhs = lhs;
    c.rhs = rhs;
    c.rel = rel;
    c.pass = holds(lhs, rel, rhs);
    c.note = std::move(note);
    return c;
}

Check make_flag(std::string claim, bool ok, std::string note)
{
    return make_check(std::move(claim), ok ? 1 : 0, Rel::Eq, 1, std::move(note));
}

void Report::merge(const Report& other, const std::string& prefix)
{
    for (auto c : other.checks) {
        if (!prefix.empty())
            c.claim = prefix + "/" + c.claim;
        checks.push_back(std::move(c));
    }
    if (!other.extra.empty())
        extra[prefix.empty() ? other.suite : prefix] = other.extra;
}

bool Report::pass() const { return failures() == 0; }

std::size_t Report::failures() const
{
    std::size_t f = 0;
    for (const auto& c : checks)
        f += c.pass ? 0 : 1;
    return f;
}

nlohmann::json Report::to_json() const
{
    nlohmann::json j;
    j["suite"] = suite;
    j["mode"] = mode;
    j["pass"] = pass();
    j["failures"] = failures();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back(c.to_json());
    j["checks"] = arr;
    if (!extra.empty())
        j["extra"] = extra;
    return j;
}

}
