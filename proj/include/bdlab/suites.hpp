#pragma once

#include "bdlab/report.hpp"
#include "bdlab/witnesses.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace bdlab {

struct RunConfig {
    nlohmann::json schedule;
    Mode coding = Mode::Toy;
    Rank Q = 6;
    Rank analysis_Q = 10;
    Rank micro_Q = 4;
    std::vector<std::string> suites;
    std::string out;
    unsigned seed = 7;
    // dependent-sequence parameters
    Rational theta = make_q(1, 64);
    Rational C = 3584;
    long length = 4;
    long window_cap = 4;

    std::shared_ptr<const WeightSchedule> weights() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

// scripted 𝔛_nr stage: canonical nodes, basic/IC/CO averages, Succ chains, and Γ̄-only nodes
std::unique_ptr<XnrSpace> scripted_xnr(std::shared_ptr<const WeightSchedule> ws, Rank Q);
// full enumeration of a restricted node menu in 𝔅_mT up to rank Q
SpaceStage micro_bmt(std::shared_ptr<const WeightSchedule> ws, Rank Q);
// subsets for the tri-agreement check: Γ̄, Γ, closures, rank prefixes, seeded random sets and
// one Succ-without-pred negative (tagged "negative")
std::vector<SubsetSpec> generated_subsets(const XnrSpace& sp, Rank Q, unsigned seed);
// basis with weights j_k = rank(γ_k), plus a menu of weight-1/2 functionals over it
std::unique_ptr<XnrSpace> c0_stage(std::shared_ptr<const WeightSchedule> ws, Rank top);

Report suite_analysis(const RunConfig& cfg);
Report suite_selfdet(const RunConfig& cfg);
Report suite_quotient(const RunConfig& cfg);
Report suite_extension(const RunConfig& cfg);
Report suite_mt(const RunConfig& cfg);
Report suite_l1(const RunConfig& cfg);
Report suite_ris(const RunConfig& cfg);
Report suite_depseq(const RunConfig& cfg);
Report suite_hi(const RunConfig& cfg);
Report suite_c0sm(const RunConfig& cfg);

// single constructions for the witness subcommands
Report witness_exactpair(const RunConfig& cfg);
Report witness_blowup(const RunConfig& cfg);

// section1 = analysis + selfdet + quotient + extension; ris = l1 + ris; depseq = depseq + hi
Report run_suite(const std::string& name, const RunConfig& cfg);
std::vector<std::string> suite_names();

}
