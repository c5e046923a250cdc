#include <exception>
#include <iostream>

#include <fmt/format.h>

#include "ljcm/dynamics.hpp"
#include "ljcm/run.hpp"

int main(int argc, char** argv) {
    using namespace ljcm;

    run::RunConfig cfg;
    try {
        cfg = run::parse_config({argv + 1, argv + argc});
    } catch (const run::HelpRequested& h) {
        std::cout << h.text();
        return 0;
    } catch (const run::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    std::cerr << "config: " << run::config_json(cfg) << '\n';

    run::ScenarioResult result;
    try {
        result = run::run_scenario(cfg);
    } catch (const DegenerateRootsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const run::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    for (int n : result.nudged_sectors)
        std::cerr << fmt::format(
            "note: sector n = {} needed a one-part-in-1e9 Kerr perturbation "
            "to separate its oscillation frequencies\n", n);

    try {
        run::write_series(result.series, cfg.out_path(), cfg.format, cfg);
        if (result.husimi)
            run::write_husimi(*result.husimi,
                              run::husimi_out_path(cfg.out_path()), cfg.format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (result.oracle_failed) {
        std::cerr << fmt::format(
            "oracle verification failed: worst fidelity gap {:.3e} exceeds "
            "1e-6\n", result.worst_oracle_gap);
        return 4;
    }
    return 0;
}
