#pragma once

#include "polygas/criteria.hpp"
#include "polygas/model.hpp"
#include "polygas/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace polygas {

/// Command-line overrides of the model's [run] section.
struct RunOptions {
    std::optional<Mode> mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_order;
    std::optional<int> ks_steps;
    std::optional<CriterionKind> kind;
    std::string model_path;
};

const std::vector<std::string>& command_names();

/// Computes one command's report. status: 0 success, 2 the command's
/// criterion failed (report still complete). Errors propagate as exceptions.
Report compute_command(const std::string& command, const Model& model, const RunOptions& options);

/// compute_command, then writes the report into `out`. "run" executes the
/// model's [run].commands into out/<command>/. Returns the exit status
/// (1 on error, with the message on stderr).
int run(const std::string& command, const ModelSpec& spec, const RunOptions& options,
        const std::filesystem::path& out);

} // namespace polygas
