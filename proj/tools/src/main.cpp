#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "config.hpp"
#include "hucai/error.hpp"
#include "modes.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"Numerical lab for the Hu-Cai network formation system"};
    std::string config_path, mode, out;
    cli.add_option("--config", config_path, "key = value configuration file")->required();
    cli.add_option("--mode", mode, "simulate, verify, mms, degiorgi or heatpot (overrides the file)");
    cli.add_option("--out", out, "output directory (overrides HUCAI_OUT_DIR and the file)");
    CLI11_PARSE(cli, argc, argv);

    try {
        std::optional<hucai::app::Mode> m;
        if (!mode.empty()) m = hucai::app::parse_mode(mode);
        const hucai::app::RunConfig cfg = hucai::app::parse_config(config_path, m);
        const auto dir = hucai::app::resolve_out_dir(cfg, out, std::getenv("HUCAI_OUT_DIR"));
        std::cout << "mode " << hucai::app::to_string(cfg.mode) << ", output " << dir.string() << '\n';
        const int code = hucai::app::run(cfg, dir, std::cout);
        std::cout << (code == 0 ? "all checks passed" : "some checks failed") << '\n';
        return code;
    } catch (const hucai::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
