#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xrt/geometry.hpp"
#include "xrt/hilbert.hpp"
#include "xrt/phantom.hpp"
#include "xrt/xform.hpp"

namespace xrt {

enum class Branch { xray, radon, classical_radon };

const char* to_string(Branch b);
Branch parse_branch(const std::string& name);

/// -1/(4 pi): every direction contributes n.grad X f = -f, so the sphere
/// integral of the X-ray integrand is -4 pi f.
inline constexpr double kXrayNormalization = -1.0 / (4.0 * std::numbers::pi);
/// 1/(2 pi^3), the constant printed in front of the published formula.
inline constexpr double kPublishedNormalization =
    1.0 / (2.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
/// -1/(8 pi^2) of the textbook second-derivative 3D Radon inversion.
inline constexpr double kClassicalRadonConstant = -1.0 / (8.0 * std::numbers::pi * std::numbers::pi);

/// xray -> kXrayNormalization, radon -> kPublishedNormalization,
/// classical_radon -> 1 (its constant is applied internally).
double default_normalization(Branch b);

struct ReconstructionConfig {
    SphereQuadrature quadrature;
    double diff_step;
    double normalization;
    Branch branch;

    static ReconstructionConfig make(Branch branch, std::size_t nodes, double diff_step);
    void validate() const;
};

/// One Radon profile per quadrature node, all on the same s-grid.
class RadonDataset {
public:
    RadonDataset(SphereQuadrature quadrature, std::vector<RadonProfile> profiles);

    const SphereQuadrature& quadrature() const { return quadrature_; }
    const std::vector<RadonProfile>& profiles() const { return profiles_; }
    const ProfileGrid& grid() const { return profiles_.front().grid; }

    RadonDataset scaled(double factor) const;

private:
    SphereQuadrature quadrature_;
    std::vector<RadonProfile> profiles_;
};

/// Grid [-r, r] with spacing close to `ds`, r = max(support radius, reach).
ProfileGrid default_profile_grid(const Phantom& ph, double reach = 0.0, double ds = 1e-2);

/// Analytic profiles for every node. Throws if the grid does not cover the
/// phantom support.
RadonDataset make_radon_dataset(const Phantom& ph, const SphereQuadrature& q, const ProfileGrid& grid);

/// normalization * sum_k w_k (n_k . grad) data(x, n_k), central differences.
double invert_xray(const XRayData& data, const ReconstructionConfig& cfg, const Vec3& x);

/// normalization * sum_k w_k (-2 pi) d/ds [H Rf(n_k, .)](x . n_k).
double invert_radon(const RadonDataset& data, const ReconstructionConfig& cfg, const Vec3& x,
                    const HilbertOptions& hilbert = {});

/// -1/(8 pi^2) sum_k w_k d2/ds2 Rf(n_k, x . n_k).
double invert_classical_radon(const RadonDataset& data, const Vec3& x, const SphereQuadrature& q);

/// Backprojection of per-node filtered profiles: sum_k w_k g_k(x . n_k),
/// each g_k evaluated by 4-point interpolation.
class FilteredBackprojector {
public:
    /// g_k = -2 pi d/ds H Rf(n_k, .)
    static FilteredBackprojector hilbert_branch(const RadonDataset& data, const HilbertOptions& opts = {});
    /// g_k = -1/(8 pi^2) d2/ds2 Rf(n_k, .)
    static FilteredBackprojector classical(const RadonDataset& data);

    double operator()(const Vec3& x) const;
    const std::vector<Profile1D>& filtered() const { return filtered_; }

private:
    FilteredBackprojector(SphereQuadrature q, std::vector<Profile1D> filtered)
        : quadrature_(std::move(q)), filtered_(std::move(filtered)) {}
    SphereQuadrature quadrature_;
    std::vector<Profile1D> filtered_;
};

/// Point reconstruction for one branch, with the filtering precomputed.
class Reconstructor {
public:
    static Reconstructor from_xray(XRayData data, ReconstructionConfig cfg);
    /// cfg.branch must be radon or classical_radon.
    static Reconstructor from_radon(const RadonDataset& data, ReconstructionConfig cfg,
                                    const HilbertOptions& opts = {});

    const ReconstructionConfig& config() const { return cfg_; }
    /// Reconstruction with normalization 1.
    double raw(const Vec3& x) const;
    double operator()(const Vec3& x) const { return cfg_.normalization * raw(x); }

private:
    Reconstructor(ReconstructionConfig cfg, XRayData xdata, std::optional<FilteredBackprojector> bp)
        : cfg_(std::move(cfg)), xdata_(std::move(xdata)), backprojector_(std::move(bp)) {}
    ReconstructionConfig cfg_;
    XRayData xdata_;
    std::optional<FilteredBackprojector> backprojector_;
};

/// Evaluates the reconstructor at every grid point.
VolumeGrid reconstruct_volume(const Reconstructor& rec, const VolumeGrid& grid);

/// Integral over S^2 of X f(x, n1) delta'(n . n1), with delta' replaced by
/// the derivative of a unit-mass Gaussian of width `band` in u = n . n1.
/// Estimates -(Rf)'(n, x . n). The quadrature is applied with its polar axis
/// turned onto n. Rejects band below the quadrature node spacing.
double grangeat_convert(const XRayData& data, const SphereQuadrature& q, const Vec3& x, const Direction3& n,
                        double band);

struct Lemma9Report {
    Vec3 x;
    /// sum_k w_k line_transform(x, n_k)
    double lhs;
    /// -2 pi sum_k w_k [H Rf(n_k, .)](x . n_k)
    double rhs;
    /// rhs / lhs, NaN when lhs is 0.
    double ratio;
    double difference;
};

/// Measures both sides of the spherical-average relation between X-ray data
/// and Hilbert-filtered Radon data. Only Gaussian phantoms are accepted.
class Lemma9Diagnostic {
public:
    Lemma9Diagnostic(const Phantom& ph, SphereQuadrature q, const ProfileGrid& grid, const HilbertOptions& opts = {});
    Lemma9Report evaluate(const Vec3& x) const;

private:
    Phantom phantom_;
    SphereQuadrature quadrature_;
    std::vector<Profile1D> hilbert_profiles_;
};

Lemma9Report lemma9_diagnostic(const Phantom& ph, const Vec3& x, const SphereQuadrature& q);

struct Calibration {
    double scale;
    /// RMS of scale * raw - truth over the sample points.
    double residual;
    std::size_t points;
};

/// Least-squares c minimizing sum |c raw_i - truth_i|^2. Throws when raw is
/// identically zero.
Calibration fit_scale(std::span<const double> raw, std::span<const double> truth);

struct CalibrationOptions {
    std::size_t points = 50;
    std::uint64_t seed = 1;
    /// Points are drawn uniformly from the ball of this fraction of the
    /// support radius.
    double radius_fraction = 0.5;
    /// Profile grid for the Radon branches; default_profile_grid when unset.
    std::optional<ProfileGrid> grid;
    /// Multiplies the forward data before inversion.
    double data_scale = 1.0;
    HilbertOptions hilbert;
};

/// Fits the normalization for cfg.branch against eval(ph, .) using
/// analytic forward data.
Calibration calibrate_normalization(const Phantom& ph, const ReconstructionConfig& cfg,
                                    const CalibrationOptions& opts = {});

/// Uniform points in the origin-centred ball of the given radius, from a
/// seeded mt19937_64.
std::vector<Vec3> random_points_in_ball(std::size_t count, double radius, std::uint64_t seed);

struct ReconstructionMetrics {
    /// ||rec - truth|| / ||truth||; 0 if both vanish, NaN if only truth does.
    double rel_l2;
    double max_error;
    std::size_t points;
};

/// Compares grid samples with eval(ph, .) over points with |x| <= radius.
ReconstructionMetrics compare_to_phantom(const VolumeGrid& rec, const Phantom& ph, double radius);

}  // namespace xrt
