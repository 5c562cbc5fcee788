#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xrt/geometry.hpp"

namespace xrt {

enum class PrimitiveKind { gaussian, ball };

const char* to_string(PrimitiveKind kind);

/// Gaussian blob A*exp(-|x-c|^2/a^2) (scale = a) or uniform ball of radius
/// scale and height A.
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::gaussian;
    Vec3 center{};
    double scale = 1.0;
    double amplitude = 1.0;
};

/// Sum of analytic primitives with closed-form point values, half-line
/// integrals and plane integrals.
///
/// The support radius is the radius of an origin-centred ball outside of
/// which every primitive is negligible: |c| + 6*scale for each primitive,
/// where a Gaussian has fallen to exp(-36) ~ 2e-16 of its amplitude.
class Phantom {
public:
    static constexpr double kSupportScales = 6.0;
    /// Gaussian tail distance, in widths, that a rasterization grid must cover.
    static constexpr double kCoverageScales = 4.0;

    Phantom() = default;
    explicit Phantom(std::vector<Primitive> primitives);
    /// Explicit support radius; must be at least the minimum implied by the
    /// primitives.
    Phantom(std::vector<Primitive> primitives, double support_radius);

    const std::vector<Primitive>& primitives() const { return primitives_; }
    double support_radius() const { return support_radius_; }
    bool empty() const { return primitives_.empty(); }
    bool is_smooth() const;

    /// Radius of the origin-centred ball a sampling grid has to contain:
    /// balls entirely, Gaussians out to kCoverageScales widths.
    double coverage_radius() const;

    Phantom scaled(double factor) const;
    Phantom translated(const Vec3& shift) const;

    static double minimum_support_radius(const std::vector<Primitive>& primitives);

private:
    std::vector<Primitive> primitives_;
    double support_radius_ = 1.0;
};

double eval(const Phantom& ph, const Vec3& x);

/// Integral of the density along {x + t n : t >= 0}.
double halfline_integral(const Phantom& ph, const Vec3& x, const Direction3& n);

/// Integral of the density over the plane {y : y.n = s}.
double plane_integral(const Phantom& ph, const Direction3& n, double s);

/// d/ds of plane_integral(ph, n, s). Balls contribute the derivative of
/// their paraboloid profile inside |s - n.c| < R.
double plane_integral_derivative(const Phantom& ph, const Direction3& n, double s);

/// Total mass of the density.
double total_integral(const Phantom& ph);

/// Samples eval at every grid point. Throws std::invalid_argument when the
/// grid box does not contain the ball of radius coverage_radius().
VolumeGrid rasterize(const Phantom& ph, const VolumeGrid& grid);

/// Text format, one record per line, '#' starts a comment:
///
///     gaussian <cx> <cy> <cz> <scale> <amplitude>
///     ball     <cx> <cy> <cz> <scale> <amplitude>
///     support_radius <r>
///
/// Unknown record kinds and malformed numbers are rejected with the line number.
Phantom parse_phantom(std::istream& in);
Phantom load_phantom(const std::string& path);
void write_phantom(std::ostream& out, const Phantom& ph);

}  // namespace xrt
