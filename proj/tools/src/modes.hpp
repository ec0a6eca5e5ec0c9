#pragma once

#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace hucai::app {

/// Runs the configured mode, writing its artifacts into `out_dir` (created
/// if needed) and one line per check to `log`. Returns 0 when every check
/// of the mode passes and 1 otherwise; library errors propagate.
int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace hucai::app
