// SPDX-License-Identifier: Apache-2.0

#include "dstm/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dstm/errors.hpp"
#include "dstm/rng.hpp"

namespace dstm {

namespace {

double int_pow(double v, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= v;
    return r;
}

// +0.0 and -0.0 compare equal but print differently; keep files canonical.
cplx drop_negzero(const cplx& z) {
    return {z.real() + 0.0, z.imag() + 0.0};
}

// The two antipodal intersection points contributed by one circle of squared
// radius s. branch 0 is the pair closer to the x-axis (theta <= pi/4), branch
// 1 the mirrored pair closer to the y-axis. For nu == 0 the points sit exactly
// on the axes.
std::pair<cplx, cplx> circle_pair(double s, int branch, double nu) {
    const double r = std::sqrt(s);
    cplx z;
    if (nu == 0.0) {
        z = branch == 0 ? cplx(r, 0.0) : cplx(0.0, r);
    } else {
        constexpr double half_pi = 1.5707963267948966192313216916398;
        const double arg = std::min(1.0, 2.0 * nu / s);
        double theta = 0.5 * std::asin(arg);
        if (branch == 1) theta = half_pi - theta;
        z = cplx(r * std::cos(theta), r * std::sin(theta));
    }
    return {drop_negzero(z), drop_negzero(-z)};
}

double metric_of_points(const std::vector<cplx>& pts) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double dx = pts[a].real() - pts[b].real();
            const double dy = pts[a].imag() - pts[b].imag();
            m = std::min(m, std::abs(dx * dx - dy * dy));
        }
    return m;
}

std::vector<cplx> layout_points(const std::vector<double>& s, unsigned branches, double nu) {
    std::vector<cplx> pts;
    pts.reserve(2 * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [z, zn] = circle_pair(s[i], (branches >> i) & 1u, nu);
        pts.push_back(z);
        pts.push_back(zn);
    }
    return pts;
}

double eval_layout(const std::vector<double>& s, unsigned branches, double nu) {
    return metric_of_points(layout_points(s, branches, nu));
}

bool feasible(const std::vector<double>& s, double s_min) {
    for (double v : s)
        if (v < s_min) return false;
    return true;
}

// Pattern search over the squared radii on the simplex {sum s = L, s >= s_min}.
// Moves along pairwise exchange directions keep the sum invariant exactly;
// random sum-zero directions unstick the search from max-min kinks that the
// exchange set cannot resolve.
double polish(std::vector<double>& s, unsigned branches, double nu, double s_min, Rng& rng) {
    const int l = static_cast<int>(s.size());
    double cur = eval_layout(s, branches, nu);
    std::vector<double> cand(s.size()), best_s(s.size());

    for (double h = 0.25; h > 1e-10; h *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            double best_v = cur;
            auto consider = [&](const std::vector<double>& c) {
                if (!feasible(c, s_min)) return;
                const double v = eval_layout(c, branches, nu);
                if (v > best_v) {
                    best_v = v;
                    best_s = c;
                }
            };
            for (int i = 0; i < l; ++i)
                for (int j = i + 1; j < l; ++j)
                    for (int sign = -1; sign <= 1; sign += 2) {
                        cand = s;
                        cand[i] += sign * h;
                        cand[j] -= sign * h;
                        consider(cand);
                    }
            if (l > 2) {
                for (int t = 0; t < 6; ++t) {
                    std::vector<double> dir(l);
                    double mean = 0.0;
                    for (double& d : dir) {
                        d = rng.gaussian();
                        mean += d;
                    }
                    mean /= l;
                    double norm = 0.0;
                    for (double& d : dir) {
                        d -= mean;
                        norm += d * d;
                    }
                    norm = std::sqrt(norm);
                    if (norm < 1e-12) continue;
                    for (int sign = -1; sign <= 1; sign += 2) {
                        cand = s;
                        for (int i = 0; i < l; ++i) cand[i] += sign * h * dir[i] / norm;
                        consider(cand);
                    }
                }
            }
            if (best_v > cur) {
                s = best_s;
                cur = best_v;
                moved = true;
            }
        }
    }
    return cur;
}

struct Circle {
    double radius;
    cplx lo, hi;  // the antipodal pair, lo < hi lexicographically by (x, y)
};

bool point_less(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Canonical form: circles ascending by radius (ties by first point), each
// contributing its pair ordered by (x, y).
ConstellationSet build_set(const std::vector<double>& s, unsigned branches, double nu) {
    std::vector<Circle> circles;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [z, zn] = circle_pair(s[i], (branches >> i) & 1u, nu);
        Circle c;
        c.radius = std::sqrt(s[i]);
        c.lo = point_less(z, zn) ? z : zn;
        c.hi = point_less(z, zn) ? zn : z;
        circles.push_back(c);
    }
    std::sort(circles.begin(), circles.end(), [](const Circle& a, const Circle& b) {
        if (a.radius != b.radius) return a.radius < b.radius;
        return point_less(a.lo, b.lo);
    });
    ConstellationSet set;
    set.nu = nu;
    for (const Circle& c : circles) {
        set.points.push_back(c.lo);
        set.points.push_back(c.hi);
        set.radii.push_back(c.radius);
    }
    return set;
}

bool list_less(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

// The x<->y mirror preserves both design constraints and the objective; pick
// the lexicographically smaller of the two equivalent lists.
ConstellationSet canonicalize(const ConstellationSet& set) {
    ConstellationSet mirror = set;
    for (auto& p : mirror.points) p = drop_negzero(cplx(p.imag(), p.real()));
    // Rebuild both through the circle sorter for a stable order.
    auto rebuild = [](const ConstellationSet& in) {
        std::vector<Circle> circles;
        for (std::size_t i = 0; i + 1 < in.points.size(); i += 2) {
            Circle c;
            c.radius = std::abs(in.points[i]);
            const cplx z = in.points[i], zn = in.points[i + 1];
            c.lo = point_less(z, zn) ? z : zn;
            c.hi = point_less(z, zn) ? zn : z;
            circles.push_back(c);
        }
        std::sort(circles.begin(), circles.end(), [](const Circle& a, const Circle& b) {
            if (a.radius != b.radius) return a.radius < b.radius;
            return point_less(a.lo, b.lo);
        });
        ConstellationSet out;
        out.nu = in.nu;
        for (const Circle& c : circles) {
            out.points.push_back(c.lo);
            out.points.push_back(c.hi);
            out.radii.push_back(c.radius);
        }
        return out;
    };
    ConstellationSet a = rebuild(set);
    ConstellationSet b = rebuild(mirror);
    return list_less(b.points, a.points) ? b : a;
}

}  // namespace

ConstellationSet closed_form_m4() {
    const double r1 = std::sqrt(1.0 / 3.0);
    const double r2 = std::sqrt(5.0 / 3.0);
    ConstellationSet set;
    set.nu = 0.0;
    set.points = {cplx(-r1, 0.0), cplx(r1, 0.0), cplx(0.0, -r2), cplx(0.0, r2)};
    set.radii = {r1, r2};
    return set;
}

double min_delta_metric(const ConstellationSet& set) {
    if (set.size() < 2) throw DimensionError("min_delta_metric: need at least two points");
    return metric_of_points(set.points);
}

double objective(const ConstellationSet& set, int n_t) {
    if (set.size() < 2) throw DimensionError("objective: need at least two points");
    double m = std::numeric_limits<double>::infinity();
    for (int a = 0; a < set.size(); ++a)
        for (int b = a + 1; b < set.size(); ++b) {
            const double dx = set.points[a].real() - set.points[b].real();
            const double dy = set.points[a].imag() - set.points[b].imag();
            m = std::min(m, int_pow(dx * dx - dy * dy, n_t));
        }
    return m;
}

ConstellationSet optimize(int m, double nu, int n_t, int starts, std::uint64_t seed) {
    if (m < 4 || m % 2 != 0) throw ConfigError("optimize: M must be even and >= 4");
    if (starts < 1) throw ConfigError("optimize: need at least one start");
    if (n_t < 1) throw ConfigError("optimize: invalid antenna count");

    const bool mirrored_nu = nu < 0.0;
    const double nu_abs = std::abs(nu);
    if (2.0 * nu_abs >= 1.0)
        throw InfeasibleDesignError(
            "optimize: hyperbola x*y = " + std::to_string(nu) +
            " misses the unit-power circles (requires |nu| < 1/2)");

    const int l = m / 2;
    const double s_min = std::max(2.0 * nu_abs, 1e-9);
    const double slack = l * (1.0 - s_min);

    double best_v = -1.0;
    std::vector<double> best_s;
    unsigned best_branches = 0;

    for (unsigned branches = 0; branches < (1u << l); ++branches) {
        for (int start = 0; start < starts; ++start) {
            Rng rng(derive_seed(seed, branches, static_cast<std::uint64_t>(start)));
            // Dirichlet(1) sample of the slack above the feasibility floor.
            std::vector<double> w(l);
            double total = 0.0;
            for (double& x : w) {
                double u;
                do {
                    u = rng.uniform();
                } while (u <= 0.0);
                x = -std::log(u);
                total += x;
            }
            std::vector<double> s(l);
            for (int i = 0; i < l; ++i) s[i] = s_min + slack * w[i] / total;

            const double v = polish(s, branches, nu_abs, s_min, rng);
            if (v > best_v) {
                best_v = v;
                best_s = s;
                best_branches = branches;
            }
        }
    }

    // Remove the tiny float drift the exchange moves can leave on the sum.
    double sum = 0.0;
    for (double v : best_s) sum += v;
    for (double& v : best_s) v *= l / sum;

    ConstellationSet set = canonicalize(build_set(best_s, best_branches, nu_abs));
    if (mirrored_nu) {
        for (auto& p : set.points) p = drop_negzero(cplx(p.real(), -p.imag()));
        set.nu = nu;
    }
    return set;
}

CriteriaReport check_criteria(const ConstellationSet& set, double tol) {
    CriteriaReport rep;
    const int m = set.size();
    if (m == 0) {
        rep.distinct = false;
        return rep;
    }

    double worst_qu = 0.0;
    double power = 0.0;
    for (const cplx& z : set.points) {
        worst_qu = std::max(worst_qu, std::abs(z.real() * z.imag() - set.nu));
        power += std::norm(z);
    }
    rep.quasi_unitary_residual = worst_qu;
    rep.power_residual = std::abs(power / m - 1.0);

    if (!set.radii.empty()) {
        double rsum = 0.0;
        for (double r : set.radii) rsum += r * r;
        rep.radius_residual = std::abs(rsum - static_cast<double>(set.radii.size()));
    }

    for (int a = 0; a < m && rep.distinct; ++a)
        for (int b = a + 1; b < m; ++b)
            if (std::abs(set.points[a] - set.points[b]) <= 1e-12) {
                rep.distinct = false;
                break;
            }

    rep.metric = m >= 2 ? metric_of_points(set.points) : 0.0;
    rep.quasi_unitary_ok = rep.quasi_unitary_residual <= tol;
    rep.power_ok = rep.power_residual <= tol && rep.radius_residual <= tol;
    rep.performance_ok = rep.metric > tol;
    return rep;
}

ConstellationSet square_qam(int m, double mean_power) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (side * side != m || side < 2)
        throw ConfigError("square_qam: M must be a perfect square >= 4");
    if (mean_power <= 0.0) throw ConfigError("square_qam: mean power must be positive");

    // Odd-integer grid {+-1, +-3, ...}; mean square per dimension (side^2-1)/3.
    const double raw_power = 2.0 * (side * side - 1) / 3.0;
    const double scale = std::sqrt(mean_power / raw_power);

    ConstellationSet set;
    set.nu = 0.0;
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b)
            set.points.emplace_back(scale * (2 * a - side + 1), scale * (2 * b - side + 1));
    // Antipodal pairs exist by grid symmetry; record one radius per pair.
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (std::abs(set.points[a] + set.points[b]) < 1e-12) set.radii.push_back(std::abs(set.points[a]));
    std::sort(set.radii.begin(), set.radii.end());
    return set;
}

void write_constellation(std::ostream& os, const ConstellationSet& set) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d %.17g\n", set.size(), set.nu);
    os << buf;
    for (const cplx& z : set.points) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", z.real(), z.imag());
        os << buf;
    }
}

void write_constellation_file(const std::string& path, const ConstellationSet& set) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for write: " + path);
    write_constellation(f, set);
}

ConstellationSet read_constellation(std::istream& is) {
    int m = 0;
    ConstellationSet set;
    if (!(is >> m >> set.nu)) throw IoError("constellation file: bad header");
    if (m < 1) throw IoError("constellation file: invalid M");
    for (int i = 0; i < m; ++i) {
        double x = 0, y = 0;
        if (!(is >> x >> y)) throw IoError("constellation file: truncated point list");
        set.points.emplace_back(x, y);
    }
    // Recover circle radii via antipodal pairing when the structure holds.
    std::vector<bool> used(m, false);
    std::vector<double> radii;
    bool paired = true;
    for (int a = 0; a < m && paired; ++a) {
        if (used[a]) continue;
        bool found = false;
        for (int b = a + 1; b < m; ++b) {
            if (!used[b] && std::abs(set.points[a] + set.points[b]) < 1e-9) {
                used[a] = used[b] = true;
                radii.push_back(std::abs(set.points[a]));
                found = true;
                break;
            }
        }
        paired = found;
    }
    if (paired) {
        std::sort(radii.begin(), radii.end());
        set.radii = std::move(radii);
    }
    return set;
}

ConstellationSet read_constellation_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    return read_constellation(f);
}

}  // namespace dstm
