#pragma once

#include <vector>

#include "ril/lattice.hpp"

namespace ril {

// Brownian constant c0 = Gamma(d/2 - 1) / (2 pi^{d/2}); the walk Green function
// behaves like d * c0 * |x|^{2-d}.
double brownian_c0(int d);

// Large-|z| expansion of g(0,z). Two terms for d = 3, leading term otherwise.
double green_asymptotic(const Site& z);

// Free Green function g(0,z) tabulated on a cube by a Dirichlet solve whose
// boundary data is the asymptotic expansion; beyond the table the expansion is used.
// Built once per dimension and shared read-only.
class FreeGreen {
public:
    static const FreeGreen& get(int d);

    double operator()(const Site& z) const;
    double operator()(const Site& x, const Site& y) const { return (*this)(y - x); }
    int dim() const { return d_; }
    int table_radius() const { return table_radius_; }
    // max |difference| between the solves at two cube radii on the inner region
    double certified_tol() const { return tol_; }

private:
    explicit FreeGreen(int d);
    int d_;
    int table_radius_ = 0;
    double tol_ = 0.0;
    std::vector<double> table_;  // octant array indexed by |z_i|
    std::vector<long long> stride_;
};

// Killed Green column g_{B_inf(0,R)}(0, .) on the cube |x|_inf <= R.
std::vector<double> killed_green_cube_column(int d, int R);

struct ExtrapolatedGreen {
    double value = 0.0;
    double error = 0.0;            // difference between 3- and 4-level extrapolants
    std::vector<double> raw;       // killed values at each radius
    std::vector<int> radii;        // effective radii R+1
};

// g(x,y) from killed Green functions on cubes with R + 1 in {8,16,32,64},
// Richardson-extrapolated in 1/(R+1).
ExtrapolatedGreen green_extrapolated(const Site& x, const Site& y);

// green(x, y, tol): extrapolated value; throws when the extrapolation error exceeds tol.
double green(const Site& x, const Site& y, double tol);

}  // namespace ril
