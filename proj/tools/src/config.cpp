#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw InvalidArgument("expected a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& v) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw InvalidArgument("expected an integer, got '" + v + "'");
    return x;
}

std::vector<int> to_int_list(const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_int(trim(item))));
    if (out.empty()) throw InvalidArgument("expected a comma-separated list of integers");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"mode", [](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); }},
        {"cells", [](RunConfig& c, const std::string& v) { c.cells = static_cast<int>(to_int(v)); }},
        {"alpha", [](RunConfig& c, const std::string& v) { c.params.alpha = to_double(v); }},
        {"beta", [](RunConfig& c, const std::string& v) { c.params.beta = to_double(v); }},
        {"gamma", [](RunConfig& c, const std::string& v) { c.params.gamma = to_double(v); }},
        {"eps_reg", [](RunConfig& c, const std::string& v) { c.params.eps_reg = to_double(v); }},
        {"v_min", [](RunConfig& c, const std::string& v) { c.params.v_min = to_double(v); }},
        {"r", [](RunConfig& c, const std::string& v) { c.params.r_exp = to_double(v); }},
        {"delta", [](RunConfig& c, const std::string& v) { c.params.delta_exp = to_double(v); }},
        {"source", [](RunConfig& c, const std::string& v) { c.source = v; }},
        {"source_amplitude", [](RunConfig& c, const std::string& v) { c.source_amplitude = to_double(v); }},
        {"source_width", [](RunConfig& c, const std::string& v) { c.source_width = to_double(v); }},
        {"m0", [](RunConfig& c, const std::string& v) { c.m0 = v; }},
        {"m0_amplitude", [](RunConfig& c, const std::string& v) { c.m0_amplitude = to_double(v); }},
        {"T", [](RunConfig& c, const std::string& v) { c.T = to_double(v); }},
        {"dt", [](RunConfig& c, const std::string& v) {
             c.dt = to_double(v);
             if (!(c.dt > 0.0)) throw InvalidArgument("dt must be > 0 (omit it for the default 0.25 h)");
         }},
        {"snapshot_stride", [](RunConfig& c, const std::string& v) { c.snapshot_stride = static_cast<int>(to_int(v)); }},
        {"tol", [](RunConfig& c, const std::string& v) { c.tol = to_double(v); }},
        {"max_iter", [](RunConfig& c, const std::string& v) { c.max_iter = static_cast<int>(to_int(v)); }},
        {"seed", [](RunConfig& c, const std::string& v) {
             const long long s = to_int(v);
             if (s < 0) throw InvalidArgument("seed must be >= 0");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
        {"verify_points", [](RunConfig& c, const std::string& v) { c.verify_points = static_cast<int>(to_int(v)); }},
        {"residual_cells", [](RunConfig& c, const std::string& v) { c.residual_cells = to_int_list(v); }},
        {"mms_cells", [](RunConfig& c, const std::string& v) { c.mms_cells = to_int_list(v); }},
        {"ball_x", [](RunConfig& c, const std::string& v) { c.ball_x = to_double(v); }},
        {"ball_y", [](RunConfig& c, const std::string& v) { c.ball_y = to_double(v); }},
        {"ball_r", [](RunConfig& c, const std::string& v) { c.ball_r = to_double(v); }},
        {"degiorgi_K", [](RunConfig& c, const std::string& v) { c.degiorgi_K = to_double(v); }},
        {"degiorgi_levels", [](RunConfig& c, const std::string& v) { c.degiorgi_levels = static_cast<int>(to_int(v)); }},
        {"degiorgi_snapshot", [](RunConfig& c, const std::string& v) { c.degiorgi_snapshot = v; }},
        {"heat_cells", [](RunConfig& c, const std::string& v) { c.heat_cells = static_cast<int>(to_int(v)); }},
        {"heat_T", [](RunConfig& c, const std::string& v) { c.heat_T = to_double(v); }},
        {"heat_panels_per_octave", [](RunConfig& c, const std::string& v) { c.heat_panels_per_octave = static_cast<int>(to_int(v)); }},
        {"heat_octaves", [](RunConfig& c, const std::string& v) { c.heat_octaves = static_cast<int>(to_int(v)); }},
        {"heat_points_per_sigma", [](RunConfig& c, const std::string& v) { c.heat_points_per_sigma = to_double(v); }},
        {"heat_truncation", [](RunConfig& c, const std::string& v) { c.heat_truncation = to_double(v); }},
        {"heat_eps", [](RunConfig& c, const std::string& v) { c.heat_eps = to_double(v); }},
        {"heat_c", [](RunConfig& c, const std::string& v) { c.heat_c = to_double(v); }},
    };
    return m;
}

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw InvalidArgument("config: " + field + " " + rule);
}

}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Simulate: return "simulate";
        case Mode::Verify: return "verify";
        case Mode::Mms: return "mms";
        case Mode::DeGiorgi: return "degiorgi";
        case Mode::HeatPot: return "heatpot";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    for (Mode m : {Mode::Simulate, Mode::Verify, Mode::Mms, Mode::DeGiorgi, Mode::HeatPot})
        if (s == to_string(m)) return m;
    throw InvalidArgument("unknown mode '" + s + "' (simulate, verify, mms, degiorgi, heatpot)");
}

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const InvalidArgument& e) {
        // keep the field name, drop the struct prefix
        std::string msg = e.what();
        if (msg.rfind("Params.", 0) == 0) msg = msg.substr(7);
        throw InvalidArgument("config: " + msg);
    }
    require(cells >= 2, "cells", "must be >= 2");
    require(T >= 0.0, "T", "must be >= 0");
    require(dt >= 0.0, "dt", "must be > 0");
    require(snapshot_stride >= 0, "snapshot_stride", "must be >= 0");
    require(tol > 0.0 && tol < 1.0, "tol", "must lie in (0, 1)");
    require(max_iter >= 1, "max_iter", "must be >= 1");
    require(source_width > 0.0, "source_width", "must be > 0");
    require(!out.empty(), "out", "must not be empty");
    require(verify_points >= 1, "verify_points", "must be >= 1");
    for (int n : residual_cells) require(n >= 4, "residual_cells", "entries must be >= 4");
    for (int n : mms_cells) require(n >= 4, "mms_cells", "entries must be >= 4");
    require(residual_cells.size() >= 2, "residual_cells", "needs at least two grids");
    require(mms_cells.size() >= 2, "mms_cells", "needs at least two grids");
    if (mode == Mode::DeGiorgi) {
        require(ball_x && ball_y && ball_r, "ball_x/ball_y/ball_r", "are required in degiorgi mode");
        require(*ball_r > 0.0, "ball_r", "must be > 0");
        require(degiorgi_levels >= 1, "degiorgi_levels", "must be >= 1");
        if (degiorgi_K) require(*degiorgi_K >= 2.0, "degiorgi_K", "must be >= 2");
    }
    if (mode == Mode::HeatPot) {
        require(heat_cells >= 4, "heat_cells", "must be >= 4");
        require(heat_T > 0.0, "heat_T", "must be > 0");
        require(heat_panels_per_octave >= 1, "heat_panels_per_octave", "must be >= 1");
        require(heat_octaves >= 1, "heat_octaves", "must be >= 1");
        require(heat_points_per_sigma >= 1.0, "heat_points_per_sigma", "must be >= 1");
        require(heat_truncation >= 6.0, "heat_truncation", "must be >= 6");
        require(heat_eps > 0.0, "heat_eps", "must be > 0");
        require(heat_c >= 0.0, "heat_c", "must be >= 0");
    }
}

RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            std::optional<Mode> mode_override) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw InvalidArgument(origin + ": line " + std::to_string(line_no) + ": " + msg);
        };
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail("unknown key '" + key + "'");
        if (!seen.insert(key).second) fail("repeated key '" + key + "'");
        if (value.empty()) fail("empty value for '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const InvalidArgument& e) {
            fail(key + ": " + e.what());
        }
    }
    if (mode_override) cfg.mode = *mode_override;
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, std::optional<Mode> mode_override) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), mode_override);
}

std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::string& cli_out, const char* env_out) {
    if (!cli_out.empty()) return cli_out;
    if (env_out && *env_out) return env_out;
    return cfg.out;
}

}  // namespace hucai::app
