#include "bdlab/io.hpp"

#include <fstream>
#include <sstream>

namespace bdlab {

std::string dump_stage(const SpaceStage& st, const std::set<NodeId>& gamma, Mode coding)
{
    std::ostringstream os;
    nlohmann::json head;
    head["space"] = to_string(st.tag());
    head["schedule"] = st.schedule().to_json();
    head["thresholds"] = st.thresholds().to_json();
    head["coding"] = to_string(coding);
    head["nodes"] = st.size();
    os << head.dump() << '\n';
    for (std::size_t i = 0; i < st.size(); ++i) {
        nlohmann::json line;
        line["id"] = st.id(i);
        line["gamma"] = gamma.count(st.id(i)) != 0;
        line["node"] = to_json(st.node(i));
        os << line.dump() << '\n';
    }
    return os.str();
}

void save_stage(const std::string& path, const SpaceStage& st, const std::set<NodeId>& gamma,
    Mode coding)
{
    write_text(path, dump_stage(st, gamma, coding));
}

LoadedStage parse_stage(const std::string& text, const std::optional<CodingRegistry>& reg)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("empty stage dump");
    auto head = nlohmann::json::parse(line);
    LoadedStage out;
    out.ws = std::make_shared<WeightSchedule>(schedule_from_json(head.at("schedule")));
    ThresholdPolicy th = ThresholdPolicy::from_json(head.at("thresholds"));
    SpaceTag tag = parse_space_tag(head.at("space").get<std::string>());
    Mode coding = parse_mode(head.value("coding", std::string("toy")));
    if (tag == SpaceTag::Xnr) {
        out.xnr = std::make_unique<XnrSpace>(out.ws, th, coding);
        if (reg)
            out.xnr->registry() = *reg;
    } else if (tag == SpaceTag::Bmt) {
        out.plain = std::make_unique<SpaceStage>(make_bmt_stage(out.ws, th));
    } else {
        out.plain = std::make_unique<SpaceStage>(out.ws, th, tag);
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line);
        GammaNode g = node_from_json(j.at("node"));
        NodeId want = j.at("id").get<std::string>();
        if (content_id(g) != want)
            throw std::runtime_error("line " + std::to_string(lineno) + ": id does not match content");
        try {
            if (out.xnr) {
                if (j.value("gamma", false))
                    out.xnr->admit(g);
                else
                    out.xnr->admit_bar(g);
            } else if (tag == SpaceTag::Quotient) {
                out.plain->register_unchecked(g);
            } else {
                out.plain->register_node(g);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

LoadedStage load_stage(const std::string& path, const std::optional<CodingRegistry>& reg)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_stage(ss.str(), reg);
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    return nlohmann::json::parse(f);
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << text;
}

}
