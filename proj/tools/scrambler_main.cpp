#include <CLI11.hpp>
#include <iostream>

#include "scrambler/cli.hpp"

int main(int argc, char** argv) {
    using namespace scrambler::cli;

    CLI::App app{"Operator-size dynamics of open Brownian SYK models"};
    RunConfig config;
    std::string format = "csv";
    std::vector<std::string> tolerances;
    std::uint64_t seed = 0;

    app.add_option("subcommand", config.subcommand, "greens | phase-diagram | size-evolve | closed-form | "
                                                     "scramblon | oracle | validate")
        ->required();
    app.add_option("-c,--config", config.input, "JSON config file or inline JSON object");
    app.add_option("-o,--out", config.output, "output path, '-' for standard output");
    app.add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    app.add_option("--tol", tolerances, "tolerance override key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    config.format = format == "json" ? Format::kJson : Format::kCsv;
    if (*seed_opt) config.seed = seed;
    for (const auto& item : tolerances) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            std::cerr << "usage error: --tol expects key=value, got '" << item << "'\n";
            return kExitUsage;
        }
        try {
            config.tolerances[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "usage error: --tol value is not a number in '" << item << "'\n";
            return kExitUsage;
        }
    }
    return run(config, std::cout, std::cerr);
}
