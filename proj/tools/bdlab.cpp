#include "bdlab/io.hpp"
#include "bdlab/suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace bdlab;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string registry;
    std::optional<unsigned> seed;
    std::string stage;
};

RunConfig load_config(const Common& c)
{
    RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::from_json(read_json(c.config));
    if (c.seed)
        cfg.seed = *c.seed;
    if (!c.out.empty())
        cfg.out = c.out;
    return cfg;
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty())
        std::cout << text;
    else
        write_text(c.out, text);
}

int emit_report(const Common& c, const Report& rep)
{
    emit(c, rep.to_json().dump(2) + "\n");
    std::cerr << rep.suite << ": " << rep.checks.size() - rep.failures() << "/" << rep.checks.size()
              << " checks pass\n";
    return rep.pass() ? 0 : 1;
}

std::optional<CodingRegistry> load_registry(const Common& c)
{
    if (c.registry.empty())
        return std::nullopt;
    std::ifstream in(c.registry);
    if (!in)
        return std::nullopt;
    return CodingRegistry::load(c.registry);
}

// a stage from --stage, or the given fallback
struct StageHandle {
    LoadedStage loaded;
    std::unique_ptr<XnrSpace> own;
    SpaceStage& stage() { return own ? own->stage() : loaded.stage(); }
    XnrSpace* xnr() { return own ? own.get() : loaded.xnr.get(); }
};

StageHandle open_stage(const Common& c, const RunConfig& cfg, bool scripted)
{
    StageHandle h;
    if (!c.stage.empty())
        h.loaded = load_stage(c.stage, load_registry(c));
    else if (scripted)
        h.own = scripted_xnr(cfg.weights(), cfg.Q);
    else
        h.own = std::make_unique<XnrSpace>(cfg.weights(), ThresholdPolicy::toy(), cfg.coding);
    return h;
}

// base | canonical:R[:J] | node id
NodeId resolve(StageHandle& h, const std::string& s)
{
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    if (s == "base" || head == "canonical") {
        GammaNode g = base_node();
        if (head == "canonical") {
            std::string rest = s.substr(colon + 1);
            auto c2 = rest.find(':');
            Rank r = std::stol(rest.substr(0, c2));
            long j = c2 == std::string::npos ? 1 : std::stol(rest.substr(c2 + 1));
            if (h.own) {
                h.own->base();
                return h.own->canonical(r, j);
            }
            g = canonical_node(h.stage(), r, j);
        } else if (h.own) {
            return h.own->base();
        }
        NodeId id = content_id(g);
        if (!h.stage().contains(id))
            throw UnknownNode("alias " + s + " is not registered in the stage");
        return id;
    }
    if (!h.stage().contains(s))
        throw UnknownNode("unknown node " + s);
    return s;
}

SubsetSpec read_subset(StageHandle& h, const std::string& path)
{
    nlohmann::json j = read_json(path);
    SubsetSpec raw = SubsetSpec::from_json(j);
    SubsetSpec s;
    s.tag = raw.tag;
    for (const auto& id : raw.members)
        s.members.insert(resolve(h, id));
    if (j.value("closure", false))
        s = reference_closure(h.stage(), s.members, s.tag);
    return s;
}

void add_common(CLI::App* app, Common& c, bool stage)
{
    app->add_option("--config", c.config, "run configuration (JSON)");
    app->add_option("--out", c.out, "output file (default stdout)");
    app->add_option("--registry", c.registry, "coding registry file");
    app->add_option("--seed", c.seed, "random seed");
    if (stage)
        app->add_option("--stage", c.stage, "stage dump from `stage build`");
}

}

int main(int argc, char** argv)
{
    CLI::App app{"Bourgain–Delbaen construction laboratory"};
    app.require_subcommand(1);
    Common c;
    int code = 0;

    auto* sched = app.add_subcommand("schedule", "weight schedules");
    sched->require_subcommand(1);
    auto* sval = sched->add_subcommand("validate", "check the lacunarity conditions");
    long depth = 6;
    sval->add_option("--depth", depth, "indices checked");
    add_common(sval, c, false);
    sval->callback([&] {
        RunConfig cfg = load_config(c);
        auto ws = cfg.weights();
        LacunarityReport lr = validate_strict(*ws, depth);
        emit(c, lr.to_json().dump(2) + "\n");
        code = lr.binding_pass() ? 0 : 1;
    });

    auto* stage = app.add_subcommand("stage", "stages");
    stage->require_subcommand(1);
    auto* sbuild = stage->add_subcommand("build", "build a scripted stage");
    std::string space = "xnr";
    Rank upto = 0;
    sbuild->add_option("--space", space, "bmt or xnr")->check(CLI::IsMember({"bmt", "xnr"}));
    sbuild->add_option("--upto", upto, "highest rank")->required();
    add_common(sbuild, c, false);
    sbuild->callback([&] {
        RunConfig cfg = load_config(c);
        if (space == "bmt") {
            SpaceStage st = micro_bmt(cfg.weights(), upto);
            emit(c, dump_stage(st));
        } else {
            auto sp = scripted_xnr(cfg.weights(), upto);
            emit(c, dump_stage(sp->stage(), sp->gamma().members, sp->registry().mode()));
            if (!c.registry.empty())
                sp->registry().save(c.registry);
        }
    });

    auto* coord = app.add_subcommand("coord", "e*_γ(d_ξ)");
    std::string gamma, xi;
    coord->add_option("--gamma", gamma, "node id, base or canonical:R[:J]")->required();
    coord->add_option("--xi", xi, "node id, base or canonical:R[:J]")->required();
    add_common(coord, c, true);
    coord->callback([&] {
        RunConfig cfg = load_config(c);
        StageHandle h = open_stage(c, cfg, false);
        NodeId g = resolve(h, gamma), x = resolve(h, xi);
        emit(c, to_string(h.stage().coordinate(g, x)) + "\n");
    });

    auto* norm = app.add_subcommand("norm", "horizon norm bounds of a block vector");
    std::string vec;
    norm->add_option("--vector", vec, "vector file {id: coefficient}")->required();
    norm->add_option("--upto", upto, "horizon (default: stage top)");
    add_common(norm, c, true);
    norm->callback([&] {
        RunConfig cfg = load_config(c);
        StageHandle h = open_stage(c, cfg, false);
        BlockVector raw = vector_from_json(read_json(vec));
        BlockVector x;
        for (const auto& [id, a] : raw.coeffs)
            x.add(resolve(h, id), a);
        Rank Q = upto > 0 ? upto : std::max<Rank>(h.stage().max_rank(), 1);
        HorizonNorm hn = horizon_norm(h.stage(), x, Q);
        nlohmann::json j{{"lower", to_string(hn.lower)}, {"upper", to_string(hn.upper)}, {"Q", Q}};
        if (hn.argmax >= 0)
            j["argmax"] = h.stage().id(static_cast<std::size_t>(hn.argmax));
        emit(c, j.dump(2) + "\n");
    });

    auto* selfdet = app.add_subcommand("selfdet", "self-determined subsets");
    selfdet->require_subcommand(1);
    auto* scheck = selfdet->add_subcommand("check", "conditions (b), (d), (e)");
    std::string subset;
    scheck->add_option("--subset", subset, "subset file {tag, members[, closure]}")->required();
    scheck->add_option("--upto", upto, "horizon (default: config Q)");
    add_common(scheck, c, true);
    scheck->callback([&] {
        RunConfig cfg = load_config(c);
        StageHandle h = open_stage(c, cfg, true);
        SubsetSpec s = read_subset(h, subset);
        SelfDetVerdict v = check_self_determined(h.stage(), s, upto > 0 ? upto : cfg.Q);
        emit(c, v.to_json().dump(2) + "\n");
        code = v.agree() ? 0 : 1;
    });

    auto* quot = app.add_subcommand("quotient", "quotient stages");
    quot->require_subcommand(1);
    auto* qbuild = quot->add_subcommand("build", "restrict to a self-determined subset");
    qbuild->add_option("--subset", subset, "subset file {tag, members[, closure]}")->required();
    add_common(qbuild, c, true);
    qbuild->callback([&] {
        RunConfig cfg = load_config(c);
        StageHandle h = open_stage(c, cfg, true);
        SubsetSpec s = read_subset(h, subset);
        Quotient qt = quotient_stage(h.stage(), s);
        emit(c, dump_stage(qt.stage));
    });

    auto* wit = app.add_subcommand("witness", "witness constructions");
    wit->require_subcommand(1);
    for (const char* name : {"ris", "exactpair", "depseq", "blowup", "hi"}) {
        auto* sub = wit->add_subcommand(name, std::string("construct and check: ") + name);
        add_common(sub, c, false);
        std::string n = name;
        sub->callback([&, n] {
            RunConfig cfg = load_config(c);
            Report rep;
            if (n == "ris")
                rep = suite_ris(cfg);
            else if (n == "exactpair")
                rep = witness_exactpair(cfg);
            else if (n == "depseq")
                rep = suite_depseq(cfg);
            else if (n == "blowup")
                rep = witness_blowup(cfg);
            else
                rep = suite_hi(cfg);
            code = emit_report(c, rep);
        });
    }

    auto* verify = app.add_subcommand("verify", "verification suites");
    verify->require_subcommand(1);
    for (const auto& name : suite_names()) {
        auto* sub = verify->add_subcommand(name, "suite " + name);
        sub->add_option("--upto", upto, "horizon for the stage suites");
        add_common(sub, c, false);
        sub->callback([&, name] {
            RunConfig cfg = load_config(c);
            if (upto > 0) {
                cfg.Q = upto;
                cfg.micro_Q = upto;
            }
            code = emit_report(c, run_suite(name, cfg));
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}
