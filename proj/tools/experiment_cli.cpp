#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "runner.hpp"

using nearcrit::cli::RunConfig;

namespace {

std::string flag_name(std::string key) {
    for (char& c : key)
        if (c == '_') c = '-';
    return "--" + key;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-critical percolation experiments. Results are JSON lines."};
    app.require_subcommand(1);

    const std::map<std::string, std::string> about = {
        {"calibrate", "estimate the four-arm probability at p = 1/2 and store it"},
        {"arms", "arm-event probabilities and the fitted exponent across meshes"},
        {"trace", "exploration-path statistics"},
        {"quad-stability", "symmetric differences of perturbed square crossings"},
        {"separate", "Z under the two laws and the separation tests"},
        {"annuli", "good-triangle census per half-annulus"},
        {"scalemap", "rescaled versus direct crossing frequencies"},
        {"emit-plots", "CSV tables from a results file"},
    };

    std::string config_file, replay_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, text] : about) {
        CLI::App* sub = app.add_subcommand(name, text);
        sub->add_option("--config", config_file, "key = value file");
        sub->add_option("--replay", replay_file, "rerun the config recorded in a results file");
        sub->add_option("--set", sets, "key=value override, repeatable");
        for (const std::string& key : nearcrit::cli::config_keys()) sub->add_option(flag_name(key), flags[key]);
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    RunConfig config;
    for (auto& [name, sub] : subs)
        if (sub->parsed()) config.subcommand = name;

    try {
        if (!replay_file.empty()) {
            auto lines = nearcrit::cli::read_lines(replay_file);
            if (lines.empty() || !lines[0].contains("config"))
                throw nearcrit::cli::ConfigError("no run record in " + replay_file);
            for (auto& [key, value] : lines[0]["config"].items()) {
                if (key == "subcommand") continue;
                std::string text;
                if (value.is_string()) text = value.get<std::string>();
                else if (value.is_array())
                    for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + value[i].dump();
                else text = value.dump();
                config.set(key, text);
            }
        }
        if (!config_file.empty()) config.load_file(config_file);
        for (const std::string& key : nearcrit::cli::config_keys()) {
            CLI::App* sub = subs[config.subcommand];
            if (sub->count(flag_name(key))) config.set(key, flags[key]);
        }
        for (const std::string& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw nearcrit::cli::ConfigError("--set expects key=value: " + s);
            config.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (config.workers > 0) setenv("NEARCRIT_THREADS", std::to_string(config.workers).c_str(), 1);

        if (config.subcommand == "emit-plots") {
            config.validate();
            std::string csv = nearcrit::cli::emit_plot_data(nearcrit::cli::read_lines(config.input), config.kind,
                                                            config.bins);
            nearcrit::cli::write_text(config, csv, std::cout);
            return 0;
        }
        auto start = std::chrono::steady_clock::now();
        auto lines = nearcrit::cli::run(config);
        nearcrit::cli::write_lines(config, lines, std::cout);
        // Wall-clock goes to stderr so result files stay byte-identical on replay.
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << config.subcommand << ": " << lines.size() << " records in " << secs << " s\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nearcrit::cli::exit_code_for(e);
    }
}
