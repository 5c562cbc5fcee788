#include "xrt/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "xrt/phantom.hpp"
#include "xrt/volume_io.hpp"
#include "xrt/xform.hpp"

namespace fs = std::filesystem;

namespace xrt {

namespace {

// Tracks files written by one command and deletes them if it fails.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : written_) fs::remove(f, ec);
        for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) fs::remove(*it, ec);
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path subdir(const std::string& name) {
        fs::path p = dir_ / name;
        if (!fs::exists(p)) {
            fs::create_directories(p);
            created_dirs_.push_back(p);
        }
        return p;
    }

    std::ofstream open(const fs::path& p) {
        written_.push_back(p);
        std::ofstream out(p, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << std::setprecision(17);
        return out;
    }

    void record(const fs::path& p) { written_.push_back(p); }

    std::vector<std::string> commit() {
        committed_ = true;
        std::vector<std::string> out;
        for (const auto& p : written_) out.push_back(p.string());
        return out;
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    std::vector<fs::path> created_dirs_;
    bool committed_ = false;
};

void close_checked(std::ofstream& out, const fs::path& p) {
    out.close();
    if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
}

ProfileGrid profile_grid_for(const RunConfig& cfg, const Phantom& ph) {
    if (cfg.s_count == 0) {
        const double reach = std::sqrt(3.0) * std::max(std::abs(cfg.volume_min), std::abs(cfg.volume_max));
        return default_profile_grid(ph, reach);
    }
    return {cfg.s_min, cfg.s_max, cfg.s_count};
}

ReconstructionConfig reconstruction_config(const RunConfig& cfg, const Phantom& ph) {
    ReconstructionConfig rc{fibonacci_sphere(cfg.nodes), cfg.diff_step > 0.0 ? cfg.diff_step : default_diff_step(ph),
                            cfg.normalization != 0.0 ? cfg.normalization : default_normalization(cfg.branch),
                            cfg.branch};
    rc.validate();
    return rc;
}

std::string profile_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "profile_%05zu.csv", k);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& why) { throw std::invalid_argument("config: " + why); };
    if (phantom.empty()) fail("phantom file path is required");
    if (nodes < 2) fail("nodes must be >= 2");
    if (s_count != 0 && (s_count < Profile1D::kMinCount || !(s_max > s_min))) {
        fail("s-grid needs s_count >= 8 and s_max > s_min");
    }
    if (volume_count < 2 || !(volume_max > volume_min)) fail("volume grid needs count >= 2 and max > min");
    if (diff_step < 0.0) fail("diff_step must be positive (or 0 for the default)");
    if (!(band > 0.0)) fail("band must be positive");
    if (check_nodes < 2) fail("check_nodes must be >= 2");
    if (sweep_count < 2 || !(sweep_max > sweep_min)) fail("sweep needs count >= 2 and max > min");
    if (points == 0) fail("points must be positive");
    if (output.empty()) fail("output directory is required");
    if (max_rel_l2 < 0.0) fail("max_rel_l2 must be >= 0");
}

CommandReport cmd_forward(const RunConfig& cfg) {
    cfg.validate();
    const Phantom ph = load_phantom(cfg.phantom);
    const SphereQuadrature q = fibonacci_sphere(cfg.nodes);
    OutputSet out(cfg.output);

    if (cfg.branch == Branch::xray) {
        const auto sources = random_points_in_ball(cfg.points, 0.5 * ph.support_radius(), cfg.seed);
        std::vector<XRayDatum> rows;
        rows.reserve(sources.size() * q.size());
        for (const auto& x : sources) {
            for (const auto& n : q.nodes()) rows.push_back({x, n, xray(ph, x, n)});
        }
        const auto p = out.path("xray.csv");
        auto f = out.open(p);
        write_xray_csv(f, rows);
        close_checked(f, p);
    } else {
        const ProfileGrid grid = profile_grid_for(cfg, ph);
        const RadonDataset data = make_radon_dataset(ph, q, grid);
        const auto dir = out.subdir("profiles");
        for (std::size_t k = 0; k < q.size(); ++k) {
            const auto p = dir / profile_name(k);
            auto f = out.open(p);
            write_profile_csv(f, data.profiles()[k]);
            close_checked(f, p);
        }
        const auto mp = out.path("manifest.csv");
        auto m = out.open(mp);
        m << "index,file,n1,n2,n3,weight\n";
        for (std::size_t k = 0; k < q.size(); ++k) {
            const auto& n = q.nodes()[k];
            m << k << ",profiles/" << profile_name(k) << ',' << n.u1() << ',' << n.u2() << ',' << n.u3() << ','
              << q.weights()[k] << '\n';
        }
        close_checked(m, mp);
    }
    return {out.commit(), {}};
}

RadonDataset load_radon_dataset(const std::string& dir) {
    const fs::path base(dir);
    std::ifstream m(base / "manifest.csv");
    if (!m) throw std::runtime_error("missing forward data: cannot open '" + (base / "manifest.csv").string() + "'");
    std::string line;
    std::getline(m, line);
    if (line != "index,file,n1,n2,n3,weight") throw std::runtime_error("manifest.csv: unexpected header");
    std::vector<Direction3> nodes;
    std::vector<double> weights;
    std::vector<RadonProfile> profiles;
    while (std::getline(m, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string idx, file, a, b, c, w;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, file, ',') || !std::getline(ss, a, ',') ||
            !std::getline(ss, b, ',') || !std::getline(ss, c, ',') || !std::getline(ss, w, ',')) {
            throw std::runtime_error("manifest.csv: malformed row '" + line + "'");
        }
        nodes.emplace_back(std::stod(a), std::stod(b), std::stod(c));
        weights.push_back(std::stod(w));
        std::ifstream pf(base / file);
        if (!pf) throw std::runtime_error("missing forward data: cannot open '" + (base / file).string() + "'");
        profiles.push_back(read_profile_csv(pf));
    }
    if (profiles.empty()) throw std::runtime_error("manifest.csv lists no profiles");
    return RadonDataset(SphereQuadrature(std::move(nodes), std::move(weights)), std::move(profiles));
}

CommandReport cmd_invert(const RunConfig& cfg) {
    cfg.validate();
    const Phantom ph = load_phantom(cfg.phantom);
    ReconstructionConfig rc = reconstruction_config(cfg, ph);

    std::optional<Reconstructor> rec;
    if (cfg.branch == Branch::xray) {
        if (!cfg.data.empty()) {
            throw std::invalid_argument("the xray branch reconstructs from phantom-analytic data; drop --data");
        }
        rec.emplace(Reconstructor::from_xray(analytic_xray(ph), rc));
    } else if (!cfg.data.empty()) {
        RadonDataset data = load_radon_dataset(cfg.data);
        rc.quadrature = data.quadrature();
        rec.emplace(Reconstructor::from_radon(data, rc));
    } else {
        rec.emplace(Reconstructor::from_radon(make_radon_dataset(ph, rc.quadrature, profile_grid_for(cfg, ph)), rc));
    }

    const VolumeGrid grid = VolumeGrid::spanning(cfg.volume_min, cfg.volume_max, cfg.volume_count);
    const VolumeGrid vol = reconstruct_volume(*rec, grid);
    const ReconstructionMetrics metrics = compare_to_phantom(vol, ph, ph.support_radius());

    double scale = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    try {
        CalibrationOptions copts;
        copts.seed = cfg.seed;
        if (cfg.s_count != 0) copts.grid = profile_grid_for(cfg, ph);
        const Calibration cal = calibrate_normalization(ph, rc, copts);
        scale = cal.scale;
        residual = cal.residual;
    } catch (const std::domain_error&) {
        // raw inversion vanishes (empty phantom): no scale to fit
    }

    OutputSet out(cfg.output);
    const auto stem = out.path("volume");
    out.record(stem.string() + ".raw");
    out.record(stem.string() + ".json");
    write_volume(stem.string(), vol, {cfg.branch, rc.normalization, rc.quadrature.size(), rc.diff_step});

    const auto mp = out.path("metrics.csv");
    auto m = out.open(mp);
    m << "branch,points,rel_l2,max_error,fitted_scale,calibration_residual,normalization\n";
    m << to_string(cfg.branch) << ',' << metrics.points << ',' << metrics.rel_l2 << ',' << metrics.max_error << ','
      << scale << ',' << residual << ',' << rc.normalization << '\n';
    close_checked(m, mp);

    CommandReport report{out.commit(), {}};
    if (cfg.max_rel_l2 > 0.0 && !(metrics.rel_l2 <= cfg.max_rel_l2)) {
        std::ostringstream msg;
        msg << "relative L2 error " << metrics.rel_l2 << " exceeds max_rel_l2 = " << cfg.max_rel_l2;
        report.failures.push_back(msg.str());
    }
    return report;
}

CommandReport cmd_check(const RunConfig& cfg) {
    cfg.validate();
    const Phantom ph = load_phantom(cfg.phantom);
    if (!ph.is_smooth()) {
        throw std::invalid_argument("check: phantom contains balls; the derivative-based checks need Gaussians only");
    }
    const Direction3 n = Direction3::normalized(cfg.check_direction);
    const SphereQuadrature fine = fibonacci_sphere(cfg.check_nodes);
    const XRayData data = analytic_xray(ph);

    std::vector<std::array<double, 4>> sweep(cfg.sweep_count);
    const double ds = (cfg.sweep_max - cfg.sweep_min) / static_cast<double>(cfg.sweep_count - 1);
    parallel_for(cfg.sweep_count, [&](std::size_t i) {
        const double s = cfg.sweep_min + static_cast<double>(i) * ds;
        const double lhs = grangeat_convert(data, fine, n.vec() * s, n, cfg.band);
        const double rhs = -plane_integral_derivative(ph, n, s);
        sweep[i] = {s, lhs, rhs, std::abs(lhs - rhs)};
    });

    const SphereQuadrature q = fibonacci_sphere(cfg.nodes);
    const auto points = random_points_in_ball(cfg.points, 0.5 * ph.support_radius(), cfg.seed);
    const Lemma9Diagnostic lemma9(ph, q, default_profile_grid(ph));
    std::vector<Lemma9Report> reports(points.size(), Lemma9Report{});
    parallel_for(points.size(), [&](std::size_t i) { reports[i] = lemma9.evaluate(points[i]); });

    OutputSet out(cfg.output);
    const auto gp = out.path("grangeat.csv");
    auto g = out.open(gp);
    g << "s,lhs,rhs,abs_error\n";
    for (const auto& r : sweep) g << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';
    close_checked(g, gp);

    const auto lp = out.path("spherical_average.csv");
    auto l = out.open(lp);
    l << "x1,x2,x3,lhs,rhs,ratio,difference\n";
    for (const auto& r : reports) {
        l << r.x.x << ',' << r.x.y << ',' << r.x.z << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ','
          << r.difference << '\n';
    }
    close_checked(l, lp);
    return {out.commit(), {}};
}

CommandReport cmd_calibrate(const RunConfig& cfg) {
    cfg.validate();
    const Phantom ph = load_phantom(cfg.phantom);
    ReconstructionConfig rc = reconstruction_config(cfg, ph);
    CalibrationOptions copts;
    copts.seed = cfg.seed;
    copts.grid = profile_grid_for(cfg, ph);
    const Calibration cal = calibrate_normalization(ph, rc, copts);

    OutputSet out(cfg.output);
    const auto p = out.path("calibration.csv");
    auto f = out.open(p);
    f << "branch,fitted_scale,residual,points,default_normalization,published_normalization,"
         "fitted_over_published\n";
    f << to_string(cfg.branch) << ',' << cal.scale << ',' << cal.residual << ',' << cal.points << ','
      << default_normalization(cfg.branch) << ',' << kPublishedNormalization << ','
      << cal.scale / kPublishedNormalization << '\n';
    close_checked(f, p);
    return {out.commit(), {}};
}

CommandReport cmd_phantom_gen(const std::string& preset, std::size_t count, std::uint64_t seed,
                              const std::string& path) {
    std::vector<Primitive> prims;
    if (preset == "unit-gaussian") {
        prims.push_back({PrimitiveKind::gaussian, {0, 0, 0}, 1.0, 1.0});
    } else if (preset == "two-gaussians") {
        prims.push_back({PrimitiveKind::gaussian, {1, 0, 0}, 1.0, 1.0});
        prims.push_back({PrimitiveKind::gaussian, {-1, 0, 0}, 1.0, 1.0});
    } else if (preset == "unit-ball") {
        prims.push_back({PrimitiveKind::ball, {0, 0, 0}, 1.0, 1.0});
    } else if (preset == "mixed") {
        prims.push_back({PrimitiveKind::gaussian, {0.5, -0.25, 0}, 0.8, 1.0});
        prims.push_back({PrimitiveKind::gaussian, {-0.75, 0.5, 0.25}, 0.5, 0.6});
        prims.push_back({PrimitiveKind::ball, {0, 0, -1}, 0.5, 0.3});
    } else if (preset == "random") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const auto centers = random_points_in_ball(count, 1.5, seed ^ 0x9e3779b97f4a7c15ull);
        for (const auto& c : centers) {
            const double scale = 0.3 + 0.5 * unit(rng);
            const double amp = 0.5 + unit(rng);
            prims.push_back({PrimitiveKind::gaussian, c, scale, amp});
        }
    } else {
        throw std::invalid_argument("unknown phantom preset '" + preset +
                                    "' (unit-gaussian, two-gaussians, unit-ball, mixed, random)");
    }
    const Phantom ph(std::move(prims));
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_phantom(f, ph);
    f.close();
    if (!f) {
        std::error_code ec;
        fs::remove(p, ec);
        throw std::runtime_error("failed writing '" + path + "'");
    }
    return {{path}, {}};
}

}  // namespace xrt
