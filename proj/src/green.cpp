#include "ril/green.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "ril/grid_solver.hpp"

namespace ril {

double brownian_c0(int d) {
    return std::tgamma(d / 2.0 - 1.0) / (2.0 * std::pow(M_PI, d / 2.0));
}

double green_asymptotic(const Site& z) {
    const int d = z.d;
    const double r2 = static_cast<double>(z.norm2_sq());
    const double r = std::sqrt(r2);
    const double lead = d * brownian_c0(d) * std::pow(r, 2.0 - d);
    if (d != 3) return lead;
    double q = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double x2 = static_cast<double>(z[i]) * z[i];
        q += x2 * x2;
    }
    return lead * (1.0 + (5.0 * q / (r2 * r2) - 3.0) / (8.0 * r2));
}

namespace {

// Dirichlet solve on |x|_inf <= R with the asymptotic expansion on the layer R+1.
std::vector<double> matched_column(int d, int R) {
    BoxIndex box = BoxIndex::cube(d, R + 1);
    GridSystem sys(box);
    for (long long k = 0; k < box.size(); ++k)
        if (sys.fixed[k]) sys.u[k] = green_asymptotic(box.site(k));
    sys.rhs[box.index(Site::zero(d))] = 1.0;
    solve(sys, 1e-13);
    return sys.u;
}

int table_solve_radius(int d) { return d == 3 ? 63 : (d == 4 ? 15 : 7); }

}  // namespace

FreeGreen::FreeGreen(int d) : d_(d) {
    if (d < 3 || d > kMaxDim) throw std::invalid_argument("free Green function needs 3 <= d <= kMaxDim");
    const int R = table_solve_radius(d);
    const int Rs = (R - 1) / 2;
    table_radius_ = R - (R + 1) / 4;
    BoxIndex box = BoxIndex::cube(d, R + 1);
    std::vector<double> big = matched_column(d, R);
    BoxIndex sbox = BoxIndex::cube(d, Rs + 1);
    std::vector<double> small = matched_column(d, Rs);

    const int inner = Rs - (Rs + 1) / 2;
    tol_ = 0.0;
    for (long long k = 0; k < sbox.size(); ++k) {
        Site s = sbox.site(k);
        if (s.norm_inf() > inner) continue;
        tol_ = std::max(tol_, std::abs(small[k] - big[box.index(s)]));
    }

    stride_.assign(d, 0);
    long long st = 1;
    for (int i = d - 1; i >= 0; --i) {
        stride_[i] = st;
        st *= table_radius_ + 1;
    }
    table_.assign(st, 0.0);
    for (long long k = 0; k < st; ++k) {
        Site s = Site::zero(d);
        long long rem = k;
        for (int i = 0; i < d; ++i) {
            s[i] = static_cast<int>(rem / stride_[i]);
            rem %= stride_[i];
        }
        table_[k] = big[box.index(s)];
    }
}

const FreeGreen& FreeGreen::get(int d) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<FreeGreen>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, std::unique_ptr<FreeGreen>(new FreeGreen(d))).first;
    return *it->second;
}

double FreeGreen::operator()(const Site& z) const {
    long long k = 0;
    for (int i = 0; i < d_; ++i) {
        const int a = std::abs(z[i]);
        if (a > table_radius_) return green_asymptotic(z);
        k += a * stride_[i];
    }
    return table_[k];
}

std::vector<double> killed_green_cube_column(int d, int R) {
    BoxIndex box = BoxIndex::cube(d, R + 1);
    GridSystem sys(box);
    sys.rhs[box.index(Site::zero(d))] = 1.0;
    solve(sys, 1e-14, 1000);
    return sys.u;
}

namespace {

struct KilledCache {
    std::mutex mu;
    std::map<std::pair<int, int>, std::vector<double>> cols;
    const std::vector<double>& get(int d, int R) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(d, R);
        auto it = cols.find(key);
        if (it == cols.end()) it = cols.emplace(key, killed_green_cube_column(d, R)).first;
        return it->second;
    }
};

KilledCache& killed_cache() {
    static KilledCache c;
    return c;
}

double richardson(const std::vector<double>& h, const std::vector<double>& v) {
    const int n = static_cast<int>(h.size());
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) {
            A(i, j) = p;
            p *= h[i];
        }
        b[i] = v[i];
    }
    return A.fullPivLu().solve(b)[0];
}

}  // namespace

ExtrapolatedGreen green_extrapolated(const Site& x, const Site& y) {
    if (x.d != y.d) throw std::invalid_argument("green: dimension mismatch");
    const int d = x.d;
    if (d < 3) throw std::invalid_argument("green requires d >= 3");
    Site z = y - x;
    for (int i = 0; i < d; ++i) z[i] = std::abs(z[i]);
    ExtrapolatedGreen out;
    const std::vector<int> Rs = d == 3 ? std::vector<int>{7, 15, 31, 63} : std::vector<int>{3, 7, 15};
    std::vector<double> h;
    for (int R : Rs) {
        if (z.norm_inf() > R) throw std::invalid_argument("green: separation too large for the killed cubes");
        const auto& col = killed_cache().get(d, R);
        BoxIndex box = BoxIndex::cube(d, R + 1);
        out.raw.push_back(col[box.index(z)]);
        out.radii.push_back(R + 1);
        h.push_back(1.0 / (R + 1));
    }
    out.value = richardson(h, out.raw);
    std::vector<double> h3(h.begin() + 1, h.end()), v3(out.raw.begin() + 1, out.raw.end());
    out.error = std::abs(out.value - richardson(h3, v3));
    return out;
}

double green(const Site& x, const Site& y, double tol) {
    ExtrapolatedGreen e = green_extrapolated(x, y);
    if (e.error > tol)
        throw std::runtime_error("green: tolerance " + std::to_string(tol) + " unachievable, extrapolation error " +
                                 std::to_string(e.error));
    return e.value;
}

}  // namespace ril
