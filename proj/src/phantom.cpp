#include "xrt/phantom.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace xrt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;

void validate(const Primitive& p) {
    if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
        throw std::invalid_argument("primitive scale must be positive and finite");
    }
    if (!std::isfinite(p.amplitude) || !std::isfinite(p.center.x) || !std::isfinite(p.center.y) ||
        !std::isfinite(p.center.z)) {
        throw std::invalid_argument("primitive center and amplitude must be finite");
    }
}

double halfline_gaussian(const Primitive& g, const Vec3& x, const Direction3& n) {
    const Vec3 r = x - g.center;
    const double p = dot(n, r);
    const double d2 = std::max(0.0, dot(r, r) - p * p);
    const double a = g.scale;
    return g.amplitude * a * (kSqrtPi / 2.0) * std::exp(-d2 / (a * a)) * std::erfc(p / a);
}

double halfline_ball(const Primitive& b, const Vec3& x, const Direction3& n) {
    const Vec3 r = x - b.center;
    const double p = dot(n, r);
    const double d2 = dot(r, r) - p * p;
    const double R2 = b.scale * b.scale;
    if (d2 >= R2) return 0.0;
    const double half = std::sqrt(R2 - d2);
    const double t_far = -p + half;
    const double t_near = std::max(0.0, -p - half);
    return b.amplitude * std::max(0.0, t_far - t_near);
}

}  // namespace

const char* to_string(PrimitiveKind kind) {
    return kind == PrimitiveKind::gaussian ? "gaussian" : "ball";
}

Phantom::Phantom(std::vector<Primitive> primitives)
    : Phantom(primitives, minimum_support_radius(primitives)) {}

Phantom::Phantom(std::vector<Primitive> primitives, double support_radius)
    : primitives_(std::move(primitives)), support_radius_(support_radius) {
    for (const auto& p : primitives_) validate(p);
    const double needed = minimum_support_radius(primitives_);
    if (!(support_radius_ > 0.0) || support_radius_ < needed) {
        std::ostringstream msg;
        msg << "support radius " << support_radius_ << " is below the required " << needed;
        throw std::invalid_argument(msg.str());
    }
}

double Phantom::minimum_support_radius(const std::vector<Primitive>& primitives) {
    double r = 0.0;
    for (const auto& p : primitives) r = std::max(r, norm(p.center) + kSupportScales * p.scale);
    return r > 0.0 ? r : 1.0;
}

bool Phantom::is_smooth() const {
    return std::all_of(primitives_.begin(), primitives_.end(),
                       [](const Primitive& p) { return p.kind == PrimitiveKind::gaussian; });
}

double Phantom::coverage_radius() const {
    double r = 0.0;
    for (const auto& p : primitives_) {
        const double reach = p.kind == PrimitiveKind::gaussian ? kCoverageScales * p.scale : p.scale;
        r = std::max(r, norm(p.center) + reach);
    }
    return r;
}

Phantom Phantom::scaled(double factor) const {
    auto prims = primitives_;
    for (auto& p : prims) p.amplitude *= factor;
    return Phantom(std::move(prims), support_radius_);
}

Phantom Phantom::translated(const Vec3& shift) const {
    auto prims = primitives_;
    for (auto& p : prims) p.center = p.center + shift;
    const double needed = minimum_support_radius(prims);
    return Phantom(std::move(prims), std::max(needed, support_radius_ + norm(shift)));
}

double eval(const Phantom& ph, const Vec3& x) {
    double sum = 0.0;
    for (const auto& p : ph.primitives()) {
        const Vec3 r = x - p.center;
        const double r2 = dot(r, r);
        if (p.kind == PrimitiveKind::gaussian) {
            sum += p.amplitude * std::exp(-r2 / (p.scale * p.scale));
        } else if (r2 <= p.scale * p.scale) {
            sum += p.amplitude;
        }
    }
    return sum;
}

double halfline_integral(const Phantom& ph, const Vec3& x, const Direction3& n) {
    double sum = 0.0;
    for (const auto& p : ph.primitives()) {
        sum += p.kind == PrimitiveKind::gaussian ? halfline_gaussian(p, x, n) : halfline_ball(p, x, n);
    }
    return sum;
}

double plane_integral(const Phantom& ph, const Direction3& n, double s) {
    double sum = 0.0;
    for (const auto& p : ph.primitives()) {
        const double u = s - dot(n, p.center);
        const double a2 = p.scale * p.scale;
        if (p.kind == PrimitiveKind::gaussian) {
            sum += p.amplitude * a2 * kPi * std::exp(-u * u / a2);
        } else if (std::abs(u) <= p.scale) {
            sum += p.amplitude * kPi * (a2 - u * u);
        }
    }
    return sum;
}

double plane_integral_derivative(const Phantom& ph, const Direction3& n, double s) {
    double sum = 0.0;
    for (const auto& p : ph.primitives()) {
        const double u = s - dot(n, p.center);
        const double a2 = p.scale * p.scale;
        if (p.kind == PrimitiveKind::gaussian) {
            sum += -2.0 * u * p.amplitude * kPi * std::exp(-u * u / a2);
        } else if (std::abs(u) < p.scale) {
            sum += -2.0 * u * p.amplitude * kPi;
        }
    }
    return sum;
}

double total_integral(const Phantom& ph) {
    double sum = 0.0;
    for (const auto& p : ph.primitives()) {
        const double a3 = p.scale * p.scale * p.scale;
        sum += p.kind == PrimitiveKind::gaussian ? p.amplitude * a3 * kPi * kSqrtPi
                                                 : p.amplitude * 4.0 / 3.0 * kPi * a3;
    }
    return sum;
}

VolumeGrid rasterize(const Phantom& ph, const VolumeGrid& grid) {
    const double reach = ph.coverage_radius();
    const Vec3 lo = grid.origin();
    const Vec3 hi = grid.upper();
    if (lo.x > -reach || lo.y > -reach || lo.z > -reach || hi.x < reach || hi.y < reach || hi.z < reach) {
        std::ostringstream msg;
        msg << "rasterize: grid [" << lo.x << ", " << hi.x << "] x [" << lo.y << ", " << hi.y << "] x [" << lo.z
            << ", " << hi.z << "] does not contain the phantom coverage ball of radius " << reach;
        throw std::invalid_argument(msg.str());
    }
    VolumeGrid out = grid;
    auto samples = out.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = eval(ph, grid.position(i));
    return out;
}

Phantom parse_phantom(std::istream& in) {
    std::vector<Primitive> prims;
    double support = 0.0;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "phantom line " << lineno << ": " << why;
        throw std::invalid_argument(msg.str());
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string kind;
        if (!(fields >> kind)) continue;

        if (kind == "support_radius") {
            if (!(fields >> support) || !(support > 0.0)) fail("support_radius needs one positive value");
        } else if (kind == "gaussian" || kind == "ball") {
            Primitive p;
            p.kind = kind == "gaussian" ? PrimitiveKind::gaussian : PrimitiveKind::ball;
            if (!(fields >> p.center.x >> p.center.y >> p.center.z >> p.scale >> p.amplitude)) {
                fail("expected: " + kind + " <cx> <cy> <cz> <scale> <amplitude>");
            }
            if (!(p.scale > 0.0)) fail("scale must be positive");
            prims.push_back(p);
        } else {
            fail("unknown record kind '" + kind + "'");
        }
        std::string extra;
        if (fields >> extra) fail("unexpected trailing field '" + extra + "'");
    }
    if (support > 0.0) return Phantom(std::move(prims), support);
    return Phantom(std::move(prims));
}

Phantom load_phantom(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open phantom file '" + path + "'");
    return parse_phantom(in);
}

void write_phantom(std::ostream& out, const Phantom& ph) {
    out << std::setprecision(17);
    out << "# kind cx cy cz scale amplitude\n";
    for (const auto& p : ph.primitives()) {
        out << to_string(p.kind) << ' ' << p.center.x << ' ' << p.center.y << ' ' << p.center.z << ' ' << p.scale
            << ' ' << p.amplitude << '\n';
    }
    out << "support_radius " << ph.support_radius() << '\n';
}

}  // namespace xrt
