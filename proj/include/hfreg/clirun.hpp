#pragma once

#include <filesystem>
#include <string>

namespace hfreg::cli {

struct Options {
    std::string command;  // solve | envelope | verify | hp | all
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    int jobs = 1;
    double tolerance_override = -1.0;  // < 0 means keep the config value
    bool quiet = false;
};

/// Exit status: 0 all checks passed, 1 usage/config/IO error,
/// 2 numerical failure (non-convergence or a failed check).
int run(const Options& options);

}  // namespace hfreg::cli
