#include <CLI11.hpp>

#include "hfreg/clirun.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hfreg: radial Hartree-Fock-type solver with weighted-regularity verification"};
    app.require_subcommand(1);

    hfreg::cli::Options options;
    std::string config_flag, config_positional;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_flag, "experiment configuration (JSON)");
        sub->add_option("config", config_positional, "experiment configuration (JSON)");
        sub->add_option("--out", options.out_dir, "output directory")->default_val(".");
        sub->add_option("--jobs", options.jobs, "concurrent suite evaluations")->default_val(1);
        sub->add_option("--tolerance", options.tolerance_override, "override the SCF tolerance");
        sub->add_flag("--quiet", options.quiet, "suppress progress output");
    };
    for (const char* name : {"solve", "envelope", "verify", "hp", "all"})
        add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);

    options.command = app.get_subcommands().front()->get_name();
    if (!config_flag.empty())
        options.config_path = config_flag;
    else if (!config_positional.empty())
        options.config_path = config_positional;
    else {
        std::cerr << "error: no config file given (use --config <path>)\n";
        return 1;
    }
    return hfreg::cli::run(options);
}
