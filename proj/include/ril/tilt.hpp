#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ril/lattice.hpp"

namespace ril {

struct TiltParams {
    int d = 3;
    double u = 1.0;
    double u_star2 = 1.0;  // the u_** parameter, no default is assumed by the CLI
    double epsilon = 0.0;
    double delta = 0.1;
    double eta = 0.05;
    double r_U = 10.0;
    ShapeSpec shape;
    int N = 1;
    // continuum grid spacing for non-radial h; <= 0 picks min(eta/4, delta/8)
    double grid_spacing = 0.0;

    double r_Utilde() const { return r_U + 4.0; }
    double plateau() const;
    double entropy_prefactor() const;  // (sqrt(u_** + eps) - sqrt(u))^2
    // throws std::invalid_argument naming the violated condition
    void validate() const;
    std::string describe() const;
};

// Radial quadrature of the mollified annulus potential, exact up to Gauss-Legendre accuracy.
// Valid for d = 3 and K a ball (or point) centred at the origin.
class RadialMollified {
public:
    RadialMollified(double a, double rU, double eta);
    double h(double r) const;      // unmollified closed form
    double value(double r) const;  // h^eta by direct quadrature
    double a() const { return a_; }
    double rU() const { return rU_; }
    double eta() const { return eta_; }

private:
    double a_, rU_, eta_, C_;
    double Phi(double t) const;
};

// Polynomial bump (1 - |z/eta|^2)^4 normalized to unit mass in R^d.
double bump_normalization(int d, double eta);
double bump(const double* z, int d, double eta);

// Midpoint quadrature of a function against the bump, spacing eta/8.
struct MollifierRule {
    std::vector<std::vector<double>> offsets;
    std::vector<double> weights;
    double raw_mass = 0.0;  // sum before renormalization (should be ~1)
    MollifierRule(int d, double eta, int per_eta = 8);
    double apply(const std::function<double(const double*)>& h, const double* z) const;
};

struct ProfileGrid {
    BoxIndex box;
    std::vector<double> h;
    std::vector<double> f;
    std::vector<double> V;
    double f_at(const Site& x) const { return box.contains(x) ? f[box.index(x)] : 1.0; }
    double V_at(const Site& x) const { return box.contains(x) ? V[box.index(x)] : 0.0; }
};

struct RadialTable;

class TiltProfile {
public:
    ~TiltProfile();
    // builds and asserts the invariants; throws with the violating site on failure
    static std::shared_ptr<const TiltProfile> build(const TiltParams& p, bool materialize = true);
    // f = 1 everywhere, for the uniform walk
    static std::shared_ptr<const TiltProfile> trivial(int d);

    const TiltParams& params() const { return p_; }
    int dim() const { return p_.d; }
    double plateau() const { return plateau_; }
    bool is_trivial() const { return trivial_; }
    bool radial() const { return radial_; }

    double h_continuum(const double* z) const;
    double h_eta(const double* z) const;
    double hN(const Site& x) const;
    double f(const Site& x) const;
    double V(const Site& x) const;
    double lambda(const Site& x) const {
        const double v = f(x);
        return v * v;
    }

    // f = 1 and V = 0 outside the sup-ball of this radius about the origin
    int support_radius() const { return support_radius_; }
    // grid of f and V over the support box plus one layer; null when too large
    const ProfileGrid* grid() const { return grid_.get(); }
    // sites with f != 1, and their closure
    SiteSet tilt_closure() const;

    // sets of the construction
    bool in_Utilde_N(const Site& x) const;
    SiteSet K_N() const;
    SiteSet K_N_delta(double frac = 1.0) const;  // blow-up of K^{frac * delta}
    SiteSet Gamma_N() const;                     // outer boundary of K_N^{delta/2}
    double max_abs_V() const { return max_abs_V_; }
    double continuum_spacing() const { return h_grid_spacing_; }
    double mollifier_mass_error() const { return moll_mass_err_; }

private:
    TiltProfile() = default;
    TiltParams p_;
    double plateau_ = 1.0;
    bool trivial_ = false;
    bool radial_ = false;
    int support_radius_ = 0;
    double max_abs_V_ = 0.0;
    double h_grid_spacing_ = 0.0;
    double moll_mass_err_ = 0.0;
    std::unique_ptr<RadialMollified> radial_q_;
    // splines of h^eta on the two eta-layers around r = a and r = rU
    std::unique_ptr<RadialTable> table_;
    // continuum grid solution of the general-shape potential
    std::unique_ptr<BoxIndex> cgrid_box_;
    std::vector<double> cgrid_;
    double cgrid_h_ = 0.0;
    std::unique_ptr<MollifierRule> rule_;
    std::unique_ptr<ProfileGrid> grid_;

    double radial_h_eta(double r) const;
    double grid_h(const double* z) const;
    void fill_grid();
};

ShapeSpec fattened(const ShapeSpec& s, double r);

// (a^{2-d} - R^{2-d})^{-1} / c0
double relative_capacity(int d, double a, double R);

struct EntropyResult {
    double H_direct = 0.0;
    double H_formula = 0.0;
    double dirichlet = 0.0;  // E(h_N, h_N)
};
EntropyResult entropy(const TiltProfile& prof);

// E(h_N,h_N) summed over the lattice (symmetry-reduced for radial profiles)
double dirichlet_hN(const TiltProfile& prof);

// sup |V| over the lattice, without needing a materialized grid
double scan_max_abs_V(const TiltProfile& prof);

// Visit every site of the sup-ball of radius R once per orbit of the hyperoctahedral
// group, with the orbit size as multiplicity. Visitor: (const Site&, long long mult).
// Sites with |x|_2^2 > r2max are skipped.
template <class Visit>
void for_each_orbit(int d, int R, Visit&& visit, long long r2max = -1) {
    if (r2max < 0) r2max = static_cast<long long>(d) * R * R;
    Site x = Site::zero(d);
    // coordinates non-increasing and non-negative
    auto rec = [&](auto&& self, int i, int maxv, long long acc) -> void {
        if (i == d) {
            long long mult = 1;
            int nz = 0;
            for (int k = 0; k < d; ++k)
                if (x[k] != 0) ++nz;
            mult <<= nz;
            // d! / prod(run lengths)!
            long long perm = 1;
            for (int k = 2; k <= d; ++k) perm *= k;
            int run = 1;
            for (int k = 1; k <= d; ++k) {
                if (k < d && x[k] == x[k - 1]) {
                    ++run;
                } else {
                    for (int t = 2; t <= run; ++t) perm /= t;
                    run = 1;
                }
            }
            visit(static_cast<const Site&>(x), mult * perm);
            return;
        }
        for (int v = 0; v <= maxv; ++v) {
            const long long a2 = acc + static_cast<long long>(v) * v;
            if (a2 > r2max) break;
            x[i] = v;
            self(self, i + 1, v, a2);
        }
        x[i] = 0;
    };
    rec(rec, 0, R, 0LL);
}

struct DirichletScanRow {
    int N;
    double scaled;  // E(h_N,h_N) / N^{d-2}
    double target;  // (1/d) relative capacity
};
std::vector<DirichletScanRow> dirichlet_scan(const TiltParams& p, const std::vector<int>& N_list);

}  // namespace ril
