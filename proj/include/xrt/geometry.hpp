#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace xrt {

/// Plain 3-vector in length units.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Unit vector on S^2. Construction checks the norm; use `normalized` to
/// project an arbitrary nonzero vector.
class Direction3 {
public:
    static constexpr double kUnitTolerance = 1e-9;

    /// Throws std::invalid_argument if |(u1,u2,u3)| deviates from 1 by more
    /// than kUnitTolerance. The components are stored as given.
    Direction3(double u1, double u2, double u3);
    explicit Direction3(const Vec3& v) : Direction3(v.x, v.y, v.z) {}

    static Direction3 normalized(const Vec3& v);

    double u1() const { return v_.x; }
    double u2() const { return v_.y; }
    double u3() const { return v_.z; }
    const Vec3& vec() const { return v_; }

    Direction3 operator-() const { return Direction3(-v_, Unchecked{}); }
    bool operator==(const Direction3&) const = default;

private:
    struct Unchecked {};
    Direction3(const Vec3& v, Unchecked) : v_(v) {}
    Vec3 v_;
};

inline double dot(const Direction3& a, const Vec3& b) { return dot(a.vec(), b); }
inline double dot(const Direction3& a, const Direction3& b) { return dot(a.vec(), b.vec()); }

/// Orthonormal pair (n, n_perp).
struct Frame {
    Direction3 n;
    Direction3 n_perp;
};

/// Deterministic perpendicular: project the coordinate axis least aligned
/// with n (lowest index wins ties) onto the plane orthogonal to n.
Frame make_frame(const Direction3& n);

/// Nodes and weights for integrals over S^2 with the unnormalized surface
/// measure (weights sum to 4*pi).
class SphereQuadrature {
public:
    SphereQuadrature(std::vector<Direction3> nodes, std::vector<double> weights);

    std::size_t size() const { return nodes_.size(); }
    std::span<const Direction3> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    /// Typical angular distance between neighbouring nodes, sqrt(4*pi/size).
    double node_spacing() const;

private:
    std::vector<Direction3> nodes_;
    std::vector<double> weights_;
};

/// Golden-angle lattice with `count` nodes and equal weights 4*pi/count.
SphereQuadrature fibonacci_sphere(std::size_t count);

/// Sum of w_k f(n_k) in node order.
double sphere_integrate(const SphereQuadrature& q, const std::function<double(const Direction3&)>& f);

/// Uniform 3D scalar field. Sample (i,j,k) sits at origin + (i,j,k)*spacing
/// and is stored at index i + dims[0]*(j + dims[1]*k).
class VolumeGrid {
public:
    VolumeGrid(Vec3 origin, Vec3 spacing, std::array<std::size_t, 3> dims);
    VolumeGrid(Vec3 origin, Vec3 spacing, std::array<std::size_t, 3> dims, std::vector<double> samples);

    /// Cube [lo,hi]^3 with n samples per axis, both ends included.
    static VolumeGrid spanning(double lo, double hi, std::size_t n);

    const Vec3& origin() const { return origin_; }
    const Vec3& spacing() const { return spacing_; }
    const std::array<std::size_t, 3>& dims() const { return dims_; }
    std::size_t size() const { return samples_.size(); }

    std::span<const double> samples() const { return samples_; }
    std::span<double> samples() { return samples_; }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + dims_[0] * (j + dims_[1] * k);
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) { return samples_[index(i, j, k)]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return samples_[index(i, j, k)]; }

    Vec3 position(std::size_t i, std::size_t j, std::size_t k) const;
    Vec3 position(std::size_t flat) const;

    /// Corner opposite to origin, i.e. position of the last sample.
    Vec3 upper() const;
    bool contains(const Vec3& p) const;

    /// Trilinear interpolation; zero outside [origin, upper()].
    double interpolate(const Vec3& p) const;

private:
    Vec3 origin_;
    Vec3 spacing_;
    std::array<std::size_t, 3> dims_;
    std::vector<double> samples_;
};

/// Runs body(i) for i in [0, count) across worker threads. Each index is
/// visited exactly once; results must be written to per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace xrt
