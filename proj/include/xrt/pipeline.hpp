#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xrt/geometry.hpp"
#include "xrt/inversion.hpp"

namespace xrt {

/// Settings shared by the command-line subcommands. Zero-valued optional
/// fields fall back to defaults derived from the phantom.
struct RunConfig {
    std::string phantom;
    Branch branch = Branch::xray;
    std::size_t nodes = 2000;

    /// Radon profile grid; s_count == 0 selects default_profile_grid.
    double s_min = 0.0;
    double s_max = 0.0;
    std::size_t s_count = 0;

    double volume_min = -3.0;
    double volume_max = 3.0;
    std::size_t volume_count = 33;

    /// 0 selects default_diff_step.
    double diff_step = 0.0;
    /// 0 selects default_normalization(branch).
    double normalization = 0.0;

    double band = 0.05;
    std::size_t check_nodes = 8000;
    Vec3 check_direction{1.0, 0.0, 0.0};
    double sweep_min = -2.0;
    double sweep_max = 2.0;
    std::size_t sweep_count = 41;

    /// Random evaluation points for X-ray export and the spherical-average report.
    std::size_t points = 20;
    std::uint64_t seed = 1;

    std::string output = "out";
    /// Directory with `forward` output to invert instead of analytic data.
    std::string data;
    /// Fail when the reconstruction error exceeds this (0 disables).
    double max_rel_l2 = 0.0;

    void validate() const;
};

struct CommandReport {
    std::vector<std::string> files;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// xray branch: x-ray.csv over `points` random sources times all nodes.
/// Radon branches: profiles/profile_NNNNN.csv per node plus manifest.csv.
CommandReport cmd_forward(const RunConfig& cfg);

/// volume.raw + volume.json + metrics.csv.
CommandReport cmd_invert(const RunConfig& cfg);

/// grangeat.csv (s, lhs, rhs, abs_error) and spherical_average.csv.
CommandReport cmd_check(const RunConfig& cfg);

/// calibration.csv for cfg.branch.
CommandReport cmd_calibrate(const RunConfig& cfg);

/// Writes a phantom file. Presets: unit-gaussian, two-gaussians, unit-ball,
/// mixed, random (count Gaussians drawn from `seed`).
CommandReport cmd_phantom_gen(const std::string& preset, std::size_t count, std::uint64_t seed,
                              const std::string& path);

/// Reads a forward-run directory (manifest.csv + profiles) back into a dataset.
RadonDataset load_radon_dataset(const std::string& dir);

}  // namespace xrt
