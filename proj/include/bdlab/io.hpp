#pragma once

#include "bdlab/xnr.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>

namespace bdlab {

// line-delimited JSON: a header {space, schedule, thresholds, coding} then one node per line
// in registration order, each {id, gamma, node}
std::string dump_stage(const SpaceStage& st, const std::set<NodeId>& gamma = {},
    Mode coding = Mode::Toy);
void save_stage(const std::string& path, const SpaceStage& st, const std::set<NodeId>& gamma = {},
    Mode coding = Mode::Toy);

struct LoadedStage {
    std::shared_ptr<const WeightSchedule> ws;
    std::unique_ptr<SpaceStage> plain;
    std::unique_ptr<XnrSpace> xnr;

    SpaceStage& stage() { return xnr ? xnr->stage() : *plain; }
};

// replays every node through the validators of its space; xnr dumps need the registry that
// certified their CO/IR averages
LoadedStage load_stage(const std::string& path, const std::optional<CodingRegistry>& reg = {});
LoadedStage parse_stage(const std::string& text, const std::optional<CodingRegistry>& reg = {});

nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}
