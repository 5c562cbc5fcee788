#include "xrt/hilbert.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace xrt {

Profile1D::Profile1D(ProfileGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (grid_.count < kMinCount || values_.size() != grid_.count) {
        throw std::invalid_argument("profile needs at least 8 samples and one value per grid node");
    }
    if (!(grid_.s_max > grid_.s_min)) throw std::invalid_argument("profile grid needs s_max > s_min");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("profile values must be finite");
    }
}

Profile1D Profile1D::sample(const ProfileGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> values(grid.count);
    for (std::size_t k = 0; k < grid.count; ++k) values[k] = f(grid.at(k));
    return Profile1D(grid, std::move(values));
}

double Profile1D::sample_cubic(double s) const {
    const double h = grid_.step();
    const double u = (s - grid_.s_min) / h;
    const double n = static_cast<double>(values_.size() - 1);
    if (!(u >= -1e-9 && u <= n + 1e-9)) {
        std::ostringstream msg;
        msg << "sample point s = " << s << " outside profile range [" << grid_.s_min << ", " << grid_.s_max << "]";
        throw std::out_of_range(msg.str());
    }
    // Stencil j-1 .. j+2 around the cell [j, j+1].
    auto j = static_cast<std::ptrdiff_t>(std::floor(u));
    j = std::clamp<std::ptrdiff_t>(j, 1, static_cast<std::ptrdiff_t>(values_.size()) - 3);
    const double t = u - static_cast<double>(j);
    const double f0 = values_[j - 1], f1 = values_[j], f2 = values_[j + 1], f3 = values_[j + 2];
    const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3;
}

Profile1D Profile1D::scaled(double factor) const {
    auto v = values_;
    for (auto& x : v) x *= factor;
    return Profile1D(grid_, std::move(v));
}

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Profile1D hilbert_spectral(const Profile1D& p, const HilbertOptions& opts) {
    if (opts.pad_factor < 1) throw std::invalid_argument("hilbert_spectral: pad factor must be >= 1");
    const auto& v = p.values();
    const std::size_t n = v.size();
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) return Profile1D(p.grid(), std::vector<double>(n, 0.0));
    const double tail = std::max(std::abs(v.front()), std::abs(v.back()));
    if (tail > opts.tail_tolerance * peak) {
        std::ostringstream msg;
        msg << "hilbert_spectral: profile does not decay at the ends (|end| = " << tail << ", max = " << peak
            << ", allowed ratio " << opts.tail_tolerance << ")";
        throw std::domain_error(msg.str());
    }

    const std::size_t padded = opts.pad_factor * n;
    const std::size_t bins = padded / 2 + 1;
    std::unique_ptr<double, FftwFree> real(static_cast<double*>(fftw_malloc(sizeof(double) * padded)));
    std::unique_ptr<fftw_complex, FftwFree> spec(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    if (!real || !spec) throw std::bad_alloc();

    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    {
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(padded);
        forward = fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE);
    }

    std::fill(real.get(), real.get() + padded, 0.0);
    std::copy(v.begin(), v.end(), real.get());
    fftw_execute(forward);

    // Coefficient k multiplies exp(+2 pi i j k / N); the multiplier is
    // -i sgn(k), with the DC and Nyquist bins zeroed.
    fftw_complex* c = spec.get();
    c[0][0] = c[0][1] = 0.0;
    for (std::size_t k = 1; k < bins; ++k) {
        const double re = c[k][0];
        const double im = c[k][1];
        c[k][0] = im;
        c[k][1] = -re;
    }
    if (padded % 2 == 0) c[bins - 1][0] = c[bins - 1][1] = 0.0;

    fftw_execute(backward);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    std::vector<double> out(n);
    const double scale = 1.0 / static_cast<double>(padded);
    for (std::size_t j = 0; j < n; ++j) out[j] = real.get()[j] * scale;
    return Profile1D(p.grid(), std::move(out));
}

double hilbert_pv_direct_at(const Profile1D& p, std::size_t k) {
    const std::size_t n = p.size();
    if (k == 0 || k + 1 >= n) {
        throw std::domain_error("hilbert_pv_direct: principal value diverges at a grid endpoint");
    }
    const double h = p.grid().step();
    const double sk = p.s(k);
    const double fk = p[k];

    // Removable singularity: (f(t) - f(s))/(s - t) -> -f'(s).
    auto q = [&](std::size_t j) {
        if (j == k) return -(p[k + 1] - p[k - 1]) / (2.0 * h);
        return (p[j] - fk) / (sk - p.s(j));
    };
    double sum = 0.5 * (q(0) + q(n - 1));
    for (std::size_t j = 1; j + 1 < n; ++j) sum += q(j);
    sum *= h;

    const double end_term = fk * std::log((sk - p.grid().s_min) / (p.grid().s_max - sk));
    return (sum + end_term) / std::numbers::pi;
}

Profile1D hilbert_pv_direct(const Profile1D& p) {
    const std::size_t n = p.size();
    if (n < Profile1D::kMinCount + 2) {
        throw std::invalid_argument("hilbert_pv_direct: need at least 10 samples to leave 8 interior nodes");
    }
    std::vector<double> out(n - 2);
    for (std::size_t k = 1; k + 1 < n; ++k) out[k - 1] = hilbert_pv_direct_at(p, k);
    const double h = p.grid().step();
    return Profile1D({p.grid().s_min + h, p.grid().s_max - h, n - 2}, std::move(out));
}

Profile1D derivative(const Profile1D& p) {
    const auto& f = p.values();
    const std::size_t n = f.size();
    const double h = p.grid().step();
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return Profile1D(p.grid(), std::move(d));
}

}  // namespace xrt
