// Command-line front end: phantom-gen, forward, invert, check, calibrate.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xrt/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Divergent-beam / planar Radon transform toolkit"};
    app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
    app.fallthrough();
    app.require_subcommand(1);

    xrt::RunConfig cfg;
    std::string branch = "xray";
    std::vector<double> direction{1.0, 0.0, 0.0};

    app.add_option("--phantom", cfg.phantom, "Phantom description file");
    app.add_option("--branch", branch, "Reconstruction branch")
        ->check(CLI::IsMember({"xray", "radon", "classical_radon"}));
    app.add_option("--nodes", cfg.nodes, "Sphere quadrature node count")->capture_default_str();
    app.add_option("--s-min", cfg.s_min, "Radon profile grid start");
    app.add_option("--s-max", cfg.s_max, "Radon profile grid end");
    app.add_option("--s-count", cfg.s_count, "Radon profile samples (0: derived from the phantom)")
        ->capture_default_str();
    app.add_option("--volume-min", cfg.volume_min, "Reconstruction cube lower bound")->capture_default_str();
    app.add_option("--volume-max", cfg.volume_max, "Reconstruction cube upper bound")->capture_default_str();
    app.add_option("--volume-count", cfg.volume_count, "Reconstruction samples per axis")->capture_default_str();
    app.add_option("--diff-step", cfg.diff_step, "Central-difference step (0: 1e-4 * support radius)")
        ->capture_default_str();
    app.add_option("--normalization", cfg.normalization, "Override the branch normalization (0: default)")
        ->capture_default_str();
    app.add_option("--band", cfg.band, "Mollifier width for the Grangeat check")->capture_default_str();
    app.add_option("--check-nodes", cfg.check_nodes, "Sphere nodes for the Grangeat check")->capture_default_str();
    app.add_option("--check-direction", direction, "Plane normal for the Grangeat sweep")->expected(3);
    app.add_option("--sweep-min", cfg.sweep_min, "Grangeat sweep start")->capture_default_str();
    app.add_option("--sweep-max", cfg.sweep_max, "Grangeat sweep end")->capture_default_str();
    app.add_option("--sweep-count", cfg.sweep_count, "Grangeat sweep samples")->capture_default_str();
    app.add_option("--points", cfg.points, "Random evaluation points")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--output", cfg.output, "Output directory")->capture_default_str();
    app.add_option("--data", cfg.data, "Directory of forward output to invert");
    app.add_option("--max-rel-l2", cfg.max_rel_l2, "Fail when the reconstruction error exceeds this")
        ->capture_default_str();

    auto* forward = app.add_subcommand("forward", "Write X-ray or Radon data for a phantom");
    auto* invert = app.add_subcommand("invert", "Reconstruct a volume and report error metrics");
    auto* check = app.add_subcommand("check", "Grangeat sweep and spherical-average report");
    auto* calibrate = app.add_subcommand("calibrate", "Fit the normalization constant of a branch");
    auto* gen = app.add_subcommand("phantom-gen", "Write a phantom file from a preset");
    std::string preset = "unit-gaussian";
    std::size_t count = 3;
    gen->add_option("--preset", preset, "unit-gaussian, two-gaussians, unit-ball, mixed or random")
        ->capture_default_str();
    gen->add_option("--count", count, "Gaussians for the random preset")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.branch = xrt::parse_branch(branch);
        cfg.check_direction = {direction.at(0), direction.at(1), direction.at(2)};

        xrt::CommandReport report;
        if (*gen) {
            if (cfg.phantom.empty()) throw std::invalid_argument("phantom-gen: --phantom names the file to write");
            report = xrt::cmd_phantom_gen(preset, count, cfg.seed, cfg.phantom);
        } else if (*forward) {
            report = xrt::cmd_forward(cfg);
        } else if (*invert) {
            report = xrt::cmd_invert(cfg);
        } else if (*check) {
            report = xrt::cmd_check(cfg);
        } else if (*calibrate) {
            report = xrt::cmd_calibrate(cfg);
        }
        std::cout << "wrote " << report.files.size() << " file(s)";
        if (!report.files.empty() && report.files.size() <= 4) {
            for (const auto& f : report.files) std::cout << "\n  " << f;
        }
        std::cout << '\n';
        for (const auto& f : report.failures) std::cerr << "error: " << f << '\n';
        return report.ok() ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
}
