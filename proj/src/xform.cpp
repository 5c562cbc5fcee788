#include "xrt/xform.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace xrt {

double xray(const Phantom& ph, const Vec3& x, const Direction3& n) { return halfline_integral(ph, x, n); }

XRayData analytic_xray(const Phantom& ph) {
    return [ph](const Vec3& x, const Direction3& n) { return halfline_integral(ph, x, n); };
}

namespace {

// Slab test for the parametric interval of {x + t n} inside [lo, hi].
bool clip_ray(const Vec3& x, const Vec3& n, const Vec3& lo, const Vec3& hi, double& t0, double& t1) {
    t0 = -std::numeric_limits<double>::infinity();
    t1 = std::numeric_limits<double>::infinity();
    const double xs[3] = {x.x, x.y, x.z};
    const double ns[3] = {n.x, n.y, n.z};
    const double los[3] = {lo.x, lo.y, lo.z};
    const double his[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        if (ns[a] == 0.0) {
            if (xs[a] < los[a] || xs[a] > his[a]) return false;
            continue;
        }
        double ta = (los[a] - xs[a]) / ns[a];
        double tb = (his[a] - xs[a]) / ns[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t1 > t0;
}

}  // namespace

double xray_numeric(const VolumeGrid& vol, const Vec3& x, const Direction3& n, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("xray_numeric: step must be positive");
    double t0 = 0.0, t1 = 0.0;
    if (!clip_ray(x, n.vec(), vol.origin(), vol.upper(), t0, t1)) return 0.0;
    t0 = std::max(t0, 0.0);
    if (t1 <= t0) return 0.0;
    const double length = t1 - t0;
    const auto panels = static_cast<std::size_t>(std::ceil(length / step));
    const double h = length / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double t = t0 + (static_cast<double>(k) + 0.5) * h;
        sum += vol.interpolate(x + n.vec() * t);
    }
    return sum * h;
}

double line_transform(const Phantom& ph, const Vec3& x, const Direction3& n) {
    return xray(ph, x, n) + xray(ph, x, -n);
}

RadonProfile radon_profile(const Phantom& ph, const Direction3& n, const ProfileGrid& grid) {
    if (grid.count < 2 || !(grid.s_max > grid.s_min)) {
        throw std::invalid_argument("radon_profile: need count >= 2 and s_max > s_min");
    }
    RadonProfile out{n, grid, std::vector<double>(grid.count)};
    for (std::size_t k = 0; k < grid.count; ++k) out.values[k] = plane_integral(ph, n, grid.at(k));
    return out;
}

double directional_derivative(const XRayData& data, const Vec3& x, const Direction3& n, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("directional derivative step must be positive");
    const Vec3 dx = n.vec() * h;
    return (data(x + dx, n) - data(x - dx, n)) / (2.0 * h);
}

double directional_derivative_xray(const Phantom& ph, const Vec3& x, const Direction3& n, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("directional derivative step must be positive");
    const Vec3 dx = n.vec() * h;
    return (xray(ph, x + dx, n) - xray(ph, x - dx, n)) / (2.0 * h);
}

double default_diff_step(const Phantom& ph) { return 1e-4 * ph.support_radius(); }

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected, std::size_t lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
        }
    }
    if (out.size() != expected) {
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                                    " columns");
    }
    return out;
}

void expect_header(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header '" + header + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw std::invalid_argument("csv: expected header '" + header + "', got '" + line + "'");
}

}  // namespace

void write_xray_csv(std::ostream& out, const std::vector<XRayDatum>& data) {
    out << "x1,x2,x3,n1,n2,n3,value\n" << std::setprecision(17);
    for (const auto& d : data) {
        out << d.x.x << ',' << d.x.y << ',' << d.x.z << ',' << d.n.u1() << ',' << d.n.u2() << ',' << d.n.u3() << ','
            << d.value << '\n';
    }
}

std::vector<XRayDatum> read_xray_csv(std::istream& in) {
    expect_header(in, "x1,x2,x3,n1,n2,n3,value");
    std::vector<XRayDatum> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto v = parse_row(line, 7, lineno);
        out.push_back({{v[0], v[1], v[2]}, Direction3(v[3], v[4], v[5]), v[6]});
    }
    return out;
}

void write_profile_csv(std::ostream& out, const RadonProfile& profile) {
    out << "n1,n2,n3,s,value\n" << std::setprecision(17);
    for (std::size_t k = 0; k < profile.values.size(); ++k) {
        out << profile.n.u1() << ',' << profile.n.u2() << ',' << profile.n.u3() << ',' << profile.grid.at(k) << ','
            << profile.values[k] << '\n';
    }
}

RadonProfile read_profile_csv(std::istream& in) {
    expect_header(in, "n1,n2,n3,s,value");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        rows.push_back(parse_row(line, 5, lineno));
    }
    if (rows.size() < 2) throw std::invalid_argument("profile csv: need at least two rows");
    const Direction3 n(rows[0][0], rows[0][1], rows[0][2]);
    ProfileGrid grid{rows.front()[3], rows.back()[3], rows.size()};
    RadonProfile out{n, grid, {}};
    out.values.reserve(rows.size());
    const double tol = 1e-9 * std::max(1.0, std::abs(grid.s_max - grid.s_min));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k][0] != rows[0][0] || rows[k][1] != rows[0][1] || rows[k][2] != rows[0][2]) {
            throw std::invalid_argument("profile csv: direction changes at row " + std::to_string(k + 2));
        }
        if (std::abs(rows[k][3] - grid.at(k)) > tol) {
            throw std::invalid_argument("profile csv: s-grid is not uniform at row " + std::to_string(k + 2));
        }
        out.values.push_back(rows[k][4]);
    }
    return out;
}

}  // namespace xrt
