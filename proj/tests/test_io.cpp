#include "bdlab/io.hpp"
#include "bdlab/suites.hpp"

#include <doctest.h>

#include <filesystem>

using namespace bdlab;

namespace {

std::shared_ptr<const WeightSchedule> t1()
{
    return std::make_shared<WeightSchedule>(toy_schedule_t1());
}

std::string tmp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("bdlab_test_" + name)).string();
}

}

TEST_CASE("run config round trip")
{
    RunConfig c;
    c.Q = 5;
    c.seed = 99;
    c.theta = make_q(1, 32);
    c.suites = {"mt", "l1"};
    RunConfig back = RunConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.seed == 99);
    CHECK(back.theta == make_q(1, 32));
}

TEST_CASE("micro stage dump replays to the same coordinates")
{
    SpaceStage st = micro_bmt(t1(), 3);
    LoadedStage ld = parse_stage(dump_stage(st));
    SpaceStage& back = ld.stage();
    REQUIRE(back.size() == st.size());
    for (std::size_t g = 0; g < st.size(); ++g) {
        CHECK(back.id(g) == st.id(g));
        for (std::size_t x = 0; x < st.size(); ++x)
            CHECK(back.coordinate(g, x) == st.coordinate(g, x));
    }
    CHECK(dump_stage(back) == dump_stage(st));
}

TEST_CASE("scripted dump needs its coding registry")
{
    auto sp = scripted_xnr(t1(), 6);
    std::string reg = tmp_path("registry.json");
    sp->registry().save(reg);
    std::string text = dump_stage(sp->stage(), sp->gamma().members, sp->registry().mode());
    LoadedStage ld = parse_stage(text, CodingRegistry::load(reg));
    REQUIRE(ld.xnr);
    CHECK(ld.xnr->gamma().members == sp->gamma().members);
    CHECK(ld.stage().size() == sp->stage().size());
    CHECK_THROWS(parse_stage(text));
    std::filesystem::remove(reg);
}

TEST_CASE("a tampered node id is rejected")
{
    SpaceStage st = micro_bmt(t1(), 2);
    std::string text = dump_stage(st);
    const NodeId& id = st.id(1);
    auto at = text.find(id);
    REQUIRE(at != std::string::npos);
    text[at] = text[at] == 'a' ? 'b' : 'a';
    CHECK_THROWS(parse_stage(text));
}

TEST_CASE("reports are deterministic and record the seed")
{
    RunConfig c;
    c.seed = 5;
    Report a = run_suite("l1", c), b = run_suite("l1", c);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json()["mode"]["seed"] == 5);
    CHECK_THROWS(run_suite("nope", c));
}
