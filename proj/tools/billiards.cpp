// Command-line driver: billiards <subcommand> --config cfg.json [--out dir]

#include <iostream>

#include "CLI11.hpp"
#include "polybill/runner.hpp"

using namespace polybill;

int main(int argc, char** argv) {
    CLI::App app{"Billiards in polygons with contracting reflection laws"};
    app.require_subcommand(1);
    app.footer("Configs are JSON objects; keys not given keep their defaults.\n"
               "BILLIARDS_THREADS sets the worker count. Exit status: 2 for invalid input, 3 for IO errors.");

    std::string config_path, out_dir, theorem;
    for (const auto& c : list_commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.description);
        if (c.name == "list-checks") {
            sub->add_option("--out", out_dir, "also write checks.json to this directory");
            continue;
        }
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        if (c.name == "check") {
            std::string names;
            for (const auto& k : list_checks()) names += (names.empty() ? "" : "|") + k.name;
            sub->add_option("--theorem", theorem, names);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg;
        if (command == "list-checks") {
            for (const auto& k : list_checks()) std::cout << k.name << "\t" << k.statement << "\n";
            if (out_dir.empty()) return 0;
        } else {
            cfg = load_config(config_path);
        }
        cfg.command = command;
        if (!out_dir.empty()) cfg.output = out_dir;
        if (!theorem.empty()) cfg.theorem = theorem;
        RunResult r = run(cfg);
        std::cout << r.summary << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "billiards: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "billiards: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "billiards: " << e.what() << "\n";
        return 1;
    }
}
