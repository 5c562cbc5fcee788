#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "xrt/geometry.hpp"
#include "xrt/phantom.hpp"

namespace xrt {

/// Divergent-beam datum: integral of the density from x along n.
struct XRayDatum {
    Vec3 x;
    Direction3 n;
    double value;
};

/// Source of divergent-beam values (x, n) -> integral over {x + t n, t >= 0}.
using XRayData = std::function<double(const Vec3&, const Direction3&)>;

/// Uniform grid s_k = s_min + k (s_max - s_min)/(count - 1).
struct ProfileGrid {
    double s_min = -1.0;
    double s_max = 1.0;
    std::size_t count = 2;

    double step() const { return (s_max - s_min) / static_cast<double>(count - 1); }
    double at(std::size_t k) const { return s_min + static_cast<double>(k) * step(); }
    bool operator==(const ProfileGrid&) const = default;
};

/// Planar Radon data s -> Rf(n, s) for one plane normal.
struct RadonProfile {
    Direction3 n;
    ProfileGrid grid;
    std::vector<double> values;
};

/// Analytic divergent-beam transform.
double xray(const Phantom& ph, const Vec3& x, const Direction3& n);

/// Analytic data source bound to a phantom.
XRayData analytic_xray(const Phantom& ph);

/// Midpoint-rule ray march through the trilinear interpolant of `vol`,
/// clipped to the grid box. The clipped length is split into
/// ceil(length/step) equal panels.
double xray_numeric(const VolumeGrid& vol, const Vec3& x, const Direction3& n, double step);

/// Full-line integral, the sum of the two opposite half-line integrals.
double line_transform(const Phantom& ph, const Vec3& x, const Direction3& n);

RadonProfile radon_profile(const Phantom& ph, const Direction3& n, const ProfileGrid& grid);

/// Central difference [g(x + h n, n) - g(x - h n, n)] / (2h).
double directional_derivative(const XRayData& data, const Vec3& x, const Direction3& n, double h);
double directional_derivative_xray(const Phantom& ph, const Vec3& x, const Direction3& n, double h);

/// Default difference step, 1e-4 of the phantom support radius.
double default_diff_step(const Phantom& ph);

/// CSV with header x1,x2,x3,n1,n2,n3,value.
void write_xray_csv(std::ostream& out, const std::vector<XRayDatum>& data);
std::vector<XRayDatum> read_xray_csv(std::istream& in);

/// CSV with header n1,n2,n3,s,value; the direction repeats on every row.
void write_profile_csv(std::ostream& out, const RadonProfile& profile);
RadonProfile read_profile_csv(std::istream& in);

}  // namespace xrt
