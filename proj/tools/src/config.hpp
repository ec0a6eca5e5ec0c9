#pragma once

// Run configuration: a flat "key = value" file. See README for the grammar
// and the list of keys.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hucai/model.hpp"

namespace hucai::app {

enum class Mode { Simulate, Verify, Mms, DeGiorgi, HeatPot };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct RunConfig {
    Mode mode = Mode::Simulate;

    int cells = 64;
    Params params;

    /// Profile name, or "file:<path>" for a snapshot with column s (m1, m2 for m0).
    std::string source = "bump";
    double source_amplitude = 120.0;
    double source_width = 0.15;
    std::string m0 = "bubble";
    double m0_amplitude = 1.0;

    double T = 1.0;
    double dt = 0.0;  ///< 0: 0.25 * h
    int snapshot_stride = 0;
    double tol = 1e-10;
    int max_iter = 50000;
    std::uint64_t seed = 1;
    std::filesystem::path out = "hucai_out";

    // verify / mms
    int verify_points = 10000;
    std::vector<int> residual_cells{64, 128, 256, 512};
    std::vector<int> mms_cells{32, 64, 128};

    // degiorgi
    std::optional<double> ball_x, ball_y, ball_r;
    std::optional<double> degiorgi_K;
    int degiorgi_levels = 40;
    std::string degiorgi_snapshot;  ///< empty: use the final state of a simulation

    // heatpot
    int heat_cells = 32;
    double heat_T = 0.5;
    int heat_panels_per_octave = 8;
    int heat_octaves = 30;
    double heat_points_per_sigma = 4.0;
    double heat_truncation = 6.0;
    double heat_eps = 1e-3;
    double heat_c = 0.0;

    /// Mode-dependent checks; throws InvalidArgument naming the field.
    void validate() const;
};

/// Throws InvalidArgument for a missing file, a malformed line (the message
/// carries "line N"), an unknown or repeated key, or an invalid value.
/// `mode_override` replaces the file's mode before validation.
RunConfig parse_config(const std::filesystem::path& path, std::optional<Mode> mode_override = std::nullopt);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>",
                            std::optional<Mode> mode_override = std::nullopt);

/// Output directory: `cli_out` if non-empty, else `env_out` if non-empty,
/// else the config's `out`.
std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::string& cli_out, const char* env_out);

}  // namespace hucai::app
