#include "xrt/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace xrt {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::xray: return "xray";
        case Branch::radon: return "radon";
        case Branch::classical_radon: return "classical_radon";
    }
    return "?";
}

Branch parse_branch(const std::string& name) {
    if (name == "xray") return Branch::xray;
    if (name == "radon") return Branch::radon;
    if (name == "classical_radon") return Branch::classical_radon;
    throw std::invalid_argument("unknown branch '" + name + "' (expected xray, radon or classical_radon)");
}

double default_normalization(Branch b) {
    switch (b) {
        case Branch::xray: return kXrayNormalization;
        case Branch::radon: return kPublishedNormalization;
        case Branch::classical_radon: return 1.0;
    }
    return 1.0;
}

ReconstructionConfig ReconstructionConfig::make(Branch branch, std::size_t nodes, double diff_step) {
    ReconstructionConfig cfg{fibonacci_sphere(nodes), diff_step, default_normalization(branch), branch};
    cfg.validate();
    return cfg;
}

void ReconstructionConfig::validate() const {
    if (!(diff_step > 0.0) || !std::isfinite(diff_step)) {
        throw std::invalid_argument("reconstruction config: diff_step must be positive");
    }
    if (normalization == 0.0 || !std::isfinite(normalization)) {
        throw std::invalid_argument("reconstruction config: normalization must be finite and nonzero");
    }
}

RadonDataset::RadonDataset(SphereQuadrature quadrature, std::vector<RadonProfile> profiles)
    : quadrature_(std::move(quadrature)), profiles_(std::move(profiles)) {
    if (profiles_.size() != quadrature_.size()) {
        throw std::invalid_argument("radon dataset: need exactly one profile per quadrature node");
    }
    const auto nodes = quadrature_.nodes();
    for (std::size_t k = 0; k < profiles_.size(); ++k) {
        if (!(profiles_[k].grid == profiles_.front().grid)) {
            throw std::invalid_argument("radon dataset: profiles must share one s-grid");
        }
        if (profiles_[k].values.size() != profiles_[k].grid.count) {
            throw std::invalid_argument("radon dataset: profile value count does not match its grid");
        }
        if (norm(profiles_[k].n.vec() - nodes[k].vec()) > 1e-9) {
            throw std::invalid_argument("radon dataset: profile " + std::to_string(k) +
                                        " direction differs from its quadrature node");
        }
    }
}

RadonDataset RadonDataset::scaled(double factor) const {
    auto profiles = profiles_;
    for (auto& p : profiles) {
        for (auto& v : p.values) v *= factor;
    }
    return RadonDataset(quadrature_, std::move(profiles));
}

ProfileGrid default_profile_grid(const Phantom& ph, double reach, double ds) {
    const double r = std::max(ph.support_radius(), reach);
    const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * r / ds));
    return {-r, r, intervals + 1};
}

RadonDataset make_radon_dataset(const Phantom& ph, const SphereQuadrature& q, const ProfileGrid& grid) {
    const double r = ph.support_radius();
    if (grid.s_min > -r || grid.s_max < r) {
        std::ostringstream msg;
        msg << "radon dataset: s-grid [" << grid.s_min << ", " << grid.s_max << "] does not cover the support [" << -r
            << ", " << r << "]";
        throw std::invalid_argument(msg.str());
    }
    std::vector<RadonProfile> profiles;
    profiles.reserve(q.size());
    for (const auto& n : q.nodes()) profiles.push_back(radon_profile(ph, n, grid));
    return RadonDataset(q, std::move(profiles));
}

namespace {

double xray_integrand_sum(const XRayData& data, const SphereQuadrature& q, const Vec3& x, double h) {
    const auto nodes = q.nodes();
    const auto weights = q.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * directional_derivative(data, x, nodes[k], h);
    return sum;
}

}  // namespace

double invert_xray(const XRayData& data, const ReconstructionConfig& cfg, const Vec3& x) {
    cfg.validate();
    if (cfg.branch != Branch::xray) throw std::invalid_argument("invert_xray: config branch is not xray");
    return cfg.normalization * xray_integrand_sum(data, cfg.quadrature, x, cfg.diff_step);
}

FilteredBackprojector FilteredBackprojector::hilbert_branch(const RadonDataset& data, const HilbertOptions& opts) {
    std::vector<Profile1D> filtered;
    filtered.reserve(data.profiles().size());
    for (const auto& p : data.profiles()) {
        filtered.push_back(derivative(hilbert_spectral(Profile1D::from_radon(p), opts)).scaled(-2.0 * kPi));
    }
    return FilteredBackprojector(data.quadrature(), std::move(filtered));
}

FilteredBackprojector FilteredBackprojector::classical(const RadonDataset& data) {
    std::vector<Profile1D> filtered;
    filtered.reserve(data.profiles().size());
    for (const auto& p : data.profiles()) {
        filtered.push_back(derivative(derivative(Profile1D::from_radon(p))).scaled(kClassicalRadonConstant));
    }
    return FilteredBackprojector(data.quadrature(), std::move(filtered));
}

double FilteredBackprojector::operator()(const Vec3& x) const {
    const auto nodes = quadrature_.nodes();
    const auto weights = quadrature_.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * filtered_[k].sample_cubic(dot(nodes[k], x));
    return sum;
}

double invert_radon(const RadonDataset& data, const ReconstructionConfig& cfg, const Vec3& x,
                    const HilbertOptions& hilbert) {
    cfg.validate();
    if (cfg.branch != Branch::radon) throw std::invalid_argument("invert_radon: config branch is not radon");
    return cfg.normalization * FilteredBackprojector::hilbert_branch(data, hilbert)(x);
}

double invert_classical_radon(const RadonDataset& data, const Vec3& x, const SphereQuadrature& q) {
    if (q.size() != data.quadrature().size()) {
        throw std::invalid_argument("invert_classical_radon: quadrature does not match the dataset");
    }
    const auto nodes = q.nodes();
    const auto weights = q.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Profile1D second = derivative(derivative(Profile1D::from_radon(data.profiles()[k])));
        sum += weights[k] * second.sample_cubic(dot(nodes[k], x));
    }
    return kClassicalRadonConstant * sum;
}

Reconstructor Reconstructor::from_xray(XRayData data, ReconstructionConfig cfg) {
    cfg.validate();
    if (cfg.branch != Branch::xray) throw std::invalid_argument("from_xray: config branch is not xray");
    return Reconstructor(std::move(cfg), std::move(data), std::nullopt);
}

Reconstructor Reconstructor::from_radon(const RadonDataset& data, ReconstructionConfig cfg,
                                        const HilbertOptions& opts) {
    cfg.validate();
    if (cfg.branch == Branch::xray) throw std::invalid_argument("from_radon: xray branch needs divergent-beam data");
    if (data.quadrature().size() != cfg.quadrature.size()) {
        throw std::invalid_argument("from_radon: dataset node count differs from the config quadrature");
    }
    auto bp = cfg.branch == Branch::radon ? FilteredBackprojector::hilbert_branch(data, opts)
                                          : FilteredBackprojector::classical(data);
    return Reconstructor(std::move(cfg), {}, std::move(bp));
}

double Reconstructor::raw(const Vec3& x) const {
    if (backprojector_) return (*backprojector_)(x);
    return xray_integrand_sum(xdata_, cfg_.quadrature, x, cfg_.diff_step);
}

VolumeGrid reconstruct_volume(const Reconstructor& rec, const VolumeGrid& grid) {
    VolumeGrid out = grid;
    auto samples = out.samples();
    parallel_for(samples.size(), [&](std::size_t i) { samples[i] = rec(grid.position(i)); });
    return out;
}

double grangeat_convert(const XRayData& data, const SphereQuadrature& q, const Vec3& x, const Direction3& n,
                        double band) {
    if (!(band > 0.0)) throw std::invalid_argument("grangeat_convert: band must be positive");
    if (band < q.node_spacing()) {
        std::ostringstream msg;
        msg << "grangeat_convert: band " << band << " is below the sphere node spacing " << q.node_spacing()
            << " (" << q.size() << " nodes); the mollifier would be undersampled";
        throw std::invalid_argument(msg.str());
    }
    const double norm_const = 1.0 / (std::sqrt(2.0 * kPi) * band);
    const double inv_b2 = 1.0 / (band * band);
    // The quadrature is rotated so its third axis lies along n: u is then the
    // node's original third coordinate.
    const Frame frame = make_frame(n);
    const Vec3 e1 = frame.n_perp.vec();
    const Vec3 e2 = cross(n.vec(), e1);
    const auto nodes = q.nodes();
    const auto weights = q.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Vec3 local = nodes[k].vec();
        const double u = local.z;
        // Past 12 widths the kernel is below 1e-30 of its peak.
        if (std::abs(u) > 12.0 * band) continue;
        const double kernel = -u * inv_b2 * norm_const * std::exp(-0.5 * u * u * inv_b2);
        const Direction3 n1 = Direction3::normalized(e1 * local.x + e2 * local.y + n.vec() * u);
        sum += weights[k] * data(x, n1) * kernel;
    }
    return sum;
}

Lemma9Diagnostic::Lemma9Diagnostic(const Phantom& ph, SphereQuadrature q, const ProfileGrid& grid,
                                   const HilbertOptions& opts)
    : phantom_(ph), quadrature_(std::move(q)) {
    if (!ph.is_smooth()) throw std::invalid_argument("spherical-average diagnostic: phantom must contain only Gaussians");
    hilbert_profiles_.reserve(quadrature_.size());
    for (const auto& n : quadrature_.nodes()) {
        hilbert_profiles_.push_back(hilbert_spectral(Profile1D::from_radon(radon_profile(ph, n, grid)), opts));
    }
}

Lemma9Report Lemma9Diagnostic::evaluate(const Vec3& x) const {
    const auto nodes = quadrature_.nodes();
    const auto weights = quadrature_.weights();
    double lhs = 0.0;
    double filtered = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        lhs += weights[k] * line_transform(phantom_, x, nodes[k]);
        filtered += weights[k] * hilbert_profiles_[k].sample_cubic(dot(nodes[k], x));
    }
    const double rhs = -2.0 * kPi * filtered;
    const double ratio = lhs != 0.0 ? rhs / lhs : std::numeric_limits<double>::quiet_NaN();
    return {x, lhs, rhs, ratio, lhs - rhs};
}

Lemma9Report lemma9_diagnostic(const Phantom& ph, const Vec3& x, const SphereQuadrature& q) {
    return Lemma9Diagnostic(ph, q, default_profile_grid(ph, norm(x))).evaluate(x);
}

Calibration fit_scale(std::span<const double> raw, std::span<const double> truth) {
    if (raw.size() != truth.size() || raw.empty()) throw std::invalid_argument("fit_scale: size mismatch");
    double rr = 0.0, rt = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        rr += raw[i] * raw[i];
        rt += raw[i] * truth[i];
    }
    if (rr == 0.0) throw std::domain_error("calibration: raw inversion is identically zero");
    const double c = rt / rr;
    double ss = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double e = c * raw[i] - truth[i];
        ss += e * e;
    }
    return {c, std::sqrt(ss / static_cast<double>(raw.size())), raw.size()};
}

Calibration calibrate_normalization(const Phantom& ph, const ReconstructionConfig& cfg,
                                    const CalibrationOptions& opts) {
    const auto points = random_points_in_ball(opts.points, opts.radius_fraction * ph.support_radius(), opts.seed);
    std::optional<Reconstructor> rec;
    if (cfg.branch == Branch::xray) {
        const double scale = opts.data_scale;
        XRayData data = [ph, scale](const Vec3& x, const Direction3& n) { return scale * xray(ph, x, n); };
        rec.emplace(Reconstructor::from_xray(std::move(data), cfg));
    } else {
        const ProfileGrid grid = opts.grid.value_or(default_profile_grid(ph));
        rec.emplace(Reconstructor::from_radon(make_radon_dataset(ph, cfg.quadrature, grid).scaled(opts.data_scale),
                                              cfg, opts.hilbert));
    }
    std::vector<double> raw(points.size()), truth(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        raw[i] = rec->raw(points[i]);
        truth[i] = eval(ph, points[i]);
    });
    return fit_scale(raw, truth);
}

std::vector<Vec3> random_points_in_ball(std::size_t count, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(count);
    while (out.size() < count) {
        const Vec3 p{u(rng), u(rng), u(rng)};
        if (dot(p, p) <= 1.0) out.push_back(p * radius);
    }
    return out;
}

ReconstructionMetrics compare_to_phantom(const VolumeGrid& rec, const Phantom& ph, double radius) {
    double err2 = 0.0, truth2 = 0.0, max_err = 0.0;
    std::size_t count = 0;
    const auto samples = rec.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec3 x = rec.position(i);
        if (norm(x) > radius) continue;
        const double t = eval(ph, x);
        const double e = samples[i] - t;
        err2 += e * e;
        truth2 += t * t;
        max_err = std::max(max_err, std::abs(e));
        ++count;
    }
    double rel = 0.0;
    if (truth2 > 0.0) {
        rel = std::sqrt(err2 / truth2);
    } else if (err2 > 0.0) {
        rel = std::numeric_limits<double>::quiet_NaN();
    }
    return {rel, max_err, count};
}

}  // namespace xrt
