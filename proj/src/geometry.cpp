#include "xrt/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace xrt {

Direction3::Direction3(double u1, double u2, double u3) : v_{u1, u2, u3} {
    const double len = norm(v_);
    if (!std::isfinite(len) || std::abs(len - 1.0) > kUnitTolerance) {
        std::ostringstream msg;
        msg << "direction (" << u1 << ", " << u2 << ", " << u3 << ") is not unit: |n| = " << len;
        throw std::invalid_argument(msg.str());
    }
}

Direction3 Direction3::normalized(const Vec3& v) {
    const double len = norm(v);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return Direction3(v * (1.0 / len), Unchecked{});
}

Frame make_frame(const Direction3& n) {
    const std::array<double, 3> c{std::abs(n.u1()), std::abs(n.u2()), std::abs(n.u3())};
    const auto k = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
    Vec3 axis{};
    (k == 0 ? axis.x : k == 1 ? axis.y : axis.z) = 1.0;
    const Vec3 perp = axis - n.vec() * dot(n, axis);
    return Frame{n, Direction3::normalized(perp)};
}

SphereQuadrature::SphereQuadrature(std::vector<Direction3> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty() || nodes_.size() != weights_.size()) {
        throw std::invalid_argument("sphere quadrature needs one weight per node and at least one node");
    }
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("sphere quadrature weights must be positive");
    }
}

double SphereQuadrature::node_spacing() const {
    return std::sqrt(4.0 * std::numbers::pi / static_cast<double>(nodes_.size()));
}

SphereQuadrature fibonacci_sphere(std::size_t count) {
    if (count < 2) throw std::invalid_argument("fibonacci_sphere: count must be >= 2");
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double n = static_cast<double>(count);
    std::vector<Direction3> nodes;
    nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        nodes.push_back(Direction3::normalized({r * std::cos(phi), r * std::sin(phi), z}));
    }
    std::vector<double> weights(count, 4.0 * std::numbers::pi / n);
    return SphereQuadrature(std::move(nodes), std::move(weights));
}

double sphere_integrate(const SphereQuadrature& q, const std::function<double(const Direction3&)>& f) {
    double sum = 0.0;
    const auto nodes = q.nodes();
    const auto weights = q.weights();
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
    return sum;
}

VolumeGrid::VolumeGrid(Vec3 origin, Vec3 spacing, std::array<std::size_t, 3> dims)
    : VolumeGrid(origin, spacing, dims, std::vector<double>(dims[0] * dims[1] * dims[2], 0.0)) {}

VolumeGrid::VolumeGrid(Vec3 origin, Vec3 spacing, std::array<std::size_t, 3> dims, std::vector<double> samples)
    : origin_(origin), spacing_(spacing), dims_(dims), samples_(std::move(samples)) {
    if (dims_[0] == 0 || dims_[1] == 0 || dims_[2] == 0) {
        throw std::invalid_argument("volume grid dims must be positive");
    }
    if (!(spacing_.x > 0.0 && spacing_.y > 0.0 && spacing_.z > 0.0)) {
        throw std::invalid_argument("volume grid spacing must be positive");
    }
    if (samples_.size() != dims_[0] * dims_[1] * dims_[2]) {
        throw std::invalid_argument("volume grid sample count does not match dims");
    }
}

VolumeGrid VolumeGrid::spanning(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("spanning grid needs n >= 2 and hi > lo");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    return VolumeGrid({lo, lo, lo}, {h, h, h}, {n, n, n});
}

Vec3 VolumeGrid::position(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin_.x + static_cast<double>(i) * spacing_.x, origin_.y + static_cast<double>(j) * spacing_.y,
            origin_.z + static_cast<double>(k) * spacing_.z};
}

Vec3 VolumeGrid::position(std::size_t flat) const {
    const std::size_t i = flat % dims_[0];
    const std::size_t j = (flat / dims_[0]) % dims_[1];
    const std::size_t k = flat / (dims_[0] * dims_[1]);
    return position(i, j, k);
}

Vec3 VolumeGrid::upper() const { return position(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1); }

bool VolumeGrid::contains(const Vec3& p) const {
    const Vec3 hi = upper();
    return p.x >= origin_.x && p.x <= hi.x && p.y >= origin_.y && p.y <= hi.y && p.z >= origin_.z && p.z <= hi.z;
}

namespace {

// Cell index and fractional offset along one axis; clamps the last cell so
// that the upper boundary sample is reachable.
inline void locate(double coord, double origin, double spacing, std::size_t dim, std::size_t& cell, double& frac) {
    if (dim == 1) {
        cell = 0;
        frac = 0.0;
        return;
    }
    const double u = (coord - origin) / spacing;
    auto c = static_cast<std::size_t>(std::floor(u));
    if (c >= dim - 1) c = dim - 2;
    cell = c;
    frac = u - static_cast<double>(c);
}

}  // namespace

double VolumeGrid::interpolate(const Vec3& p) const {
    if (!contains(p)) return 0.0;
    std::size_t i, j, k;
    double fx, fy, fz;
    locate(p.x, origin_.x, spacing_.x, dims_[0], i, fx);
    locate(p.y, origin_.y, spacing_.y, dims_[1], j, fy);
    locate(p.z, origin_.z, spacing_.z, dims_[2], k, fz);
    const std::size_t i1 = dims_[0] > 1 ? i + 1 : i;
    const std::size_t j1 = dims_[1] > 1 ? j + 1 : j;
    const std::size_t k1 = dims_[2] > 1 ? k + 1 : k;

    const double c00 = at(i, j, k) * (1 - fx) + at(i1, j, k) * fx;
    const double c10 = at(i, j1, k) * (1 - fx) + at(i1, j1, k) * fx;
    const double c01 = at(i, j, k1) * (1 - fx) + at(i1, j, k1) * fx;
    const double c11 = at(i, j1, k1) * (1 - fx) + at(i1, j1, k1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace xrt
