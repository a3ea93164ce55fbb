#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mutrans/cli.hpp"

namespace {

int emit(const mutrans::cli::Report& rep, const std::string& out, const std::string& dump_grid) {
    std::string text = mutrans::cli::to_json_text(rep.doc);
    if (out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) {
            std::cerr << "mutrans: cannot write " << out << "\n";
            return 1;
        }
        os << text;
    }
    if (rep.doc.contains("error")) std::cerr << "mutrans: " << rep.doc["error"]["message"].get<std::string>() << "\n";
    if (!dump_grid.empty() && rep.exit_code != 1) {
        if (!rep.dump) {
            std::cerr << "mutrans: --dump-grid is not available for " << rep.doc["command"].get<std::string>() << "\n";
            return 1;
        }
        try {
            rep.dump(dump_grid);
        } catch (const std::exception& e) {
            std::cerr << "mutrans: " << e.what() << "\n";
            return 1;
        }
    }
    return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    namespace mc = mutrans::cli;
    CLI::App app{"mutrans: mu-transmission toolkit (symbols, Wiener-Hopf, half-line and interval solvers)"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    std::string config, out, dump_grid, replay;
    app.add_option("--config", config, "flat key = value file with [command] sections");
    app.add_option("--out", out, "write the JSON report here instead of stdout");
    app.add_option("--dump-grid", dump_grid, "write solution or factor data (.csv, or .bin for line grids)");
    app.add_option("--replay", replay, "re-run the command and inputs of a JSON report");

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : mc::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        for (const auto& p : mc::command_params(name)) {
            std::string help = p.help;
            if (!p.def) help += " (required)";
            else if (!p.def->empty()) help += " [" + *p.def + "]";
            sub->add_option("--" + p.key, values[name][p.key], help);
        }
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    mc::RunConfig cfg;
    try {
        if (!replay.empty()) {
            if (!app.get_subcommands().empty()) throw mc::UsageError("--replay takes no command");
            std::ifstream is(replay);
            if (!is) throw mc::UsageError("cannot open " + replay);
            mc::json doc;
            try {
                doc = mc::json::parse(is);
            } catch (const mc::json::exception& e) {
                throw mc::UsageError(replay + ": " + e.what());
            }
            cfg = mc::config_from_report(doc);
        } else {
            if (app.get_subcommands().empty()) {
                std::cout << app.help();
                return 1;
            }
            cfg.command = app.get_subcommands().front()->get_name();
            if (!config.empty()) cfg.params = mc::read_config_file(config, cfg.command);
            CLI::App* sub = subs.at(cfg.command);
            for (const auto& p : mc::command_params(cfg.command))
                if (sub->get_option("--" + p.key)->count() > 0) cfg.params[p.key] = values[cfg.command][p.key];
        }
    } catch (const mc::UsageError& e) {
        mc::Report rep;
        rep.doc["schema_version"] = mc::schema_version;
        rep.doc["command"] = cfg.command;
        rep.doc["error"] = mc::json{{"kind", "usage"}, {"module", "cli"}, {"op", "parse"}, {"message", e.what()}};
        rep.exit_code = 1;
        return emit(rep, out, "");
    }
    return emit(mc::run(cfg), out, dump_grid);
}
