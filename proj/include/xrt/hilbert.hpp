#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "xrt/xform.hpp"

namespace xrt {

/// Real samples on a uniform grid, count >= 8.
class Profile1D {
public:
    static constexpr std::size_t kMinCount = 8;

    Profile1D(ProfileGrid grid, std::vector<double> values);
    static Profile1D sample(const ProfileGrid& grid, const std::function<double(double)>& f);
    static Profile1D from_radon(const RadonProfile& profile) { return Profile1D(profile.grid, profile.values); }

    const ProfileGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double s(std::size_t k) const { return grid_.at(k); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }

    /// 4-point Lagrange interpolation on the nodes around s (stencil shifted
    /// inwards at the ends). Throws std::out_of_range outside [s_min, s_max].
    double sample_cubic(double s) const;

    Profile1D scaled(double factor) const;

private:
    ProfileGrid grid_;
    std::vector<double> values_;
};

struct HilbertOptions {
    /// Padded transform length = pad_factor * count.
    std::size_t pad_factor = 4;
    /// Largest end value allowed, relative to max |value|.
    double tail_tolerance = 1e-3;
};

/// Hf(s) = (1/pi) PV int f(t)/(s - t) dt via the -i sgn(k) multiplier on the
/// DFT of the zero-padded profile. Throws std::domain_error when either end
/// value exceeds tail_tolerance * max|f|, since the periodic extension would
/// then wrap a discontinuity into the result.
Profile1D hilbert_spectral(const Profile1D& p, const HilbertOptions& opts = {});

/// Direct quadrature of the same principal value at interior node k:
/// trapezoid sum of (f(t) - f(s))/(s - t) plus the exact integral of
/// f(s)/(s - t) over [s_min, s_max]. Throws std::domain_error at the two
/// end nodes where that integral diverges.
double hilbert_pv_direct_at(const Profile1D& p, std::size_t k);

/// hilbert_pv_direct_at over all interior nodes. The result lives on the
/// interior grid [s_min + ds, s_max - ds] with count - 2 samples.
Profile1D hilbert_pv_direct(const Profile1D& p);

/// First derivative: 4th-order central differences in the interior,
/// 2nd-order stencils on the two outermost nodes at each end.
Profile1D derivative(const Profile1D& p);

}  // namespace xrt
