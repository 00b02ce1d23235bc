#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ril/lattice.hpp"
#include "ril/tilt.hpp"

namespace ril {

enum class GreenFlavor { free, killed, tilted_free, tilted_killed };
std::string to_string(GreenFlavor f);

struct GreenTable {
    SiteSet sites;
    Eigen::MatrixXd values;
    GreenFlavor flavor = GreenFlavor::free;
    double tol = 0.0;

    double operator()(const Site& x, const Site& y) const { return values(sites.index_of(x), sites.index_of(y)); }
    double max_asymmetry() const;
    // rows "x,y,value" with sites written as space-separated coordinates
    void write_csv(std::ostream& os) const;
};

// g(x,y) for x in rows, y in cols, from the tabulated free Green function
Eigen::MatrixXd free_green_matrix(const std::vector<Site>& rows, const std::vector<Site>& cols);

GreenTable free_green_table(const SiteSet& M);

// Sparse Cholesky of the killed operator L_U (conductances 1/2d, or f(x)f(y)/2d with a profile).
// Columns of its inverse are the killed Green densities g_U(., y).
class KilledSolver {
public:
    explicit KilledSolver(const SiteSet& U, const TiltProfile* prof = nullptr);
    ~KilledSolver();
    const SiteSet& domain() const { return U_; }
    // g_U(., y) on U, indexed like domain()
    Eigen::VectorXd column(const Site& y) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    struct Impl;
    SiteSet U_;
    std::unique_ptr<Impl> impl_;
};

GreenTable killed_green_table(const SiteSet& U);
GreenTable tilted_killed_green_table(const SiteSet& U, const TiltProfile& prof);

struct EquilibriumMeasure {
    SiteSet support;              // the set M
    std::vector<double> weights;  // per site of support, zero off the inner boundary
    double total = 0.0;           // capacity
    bool tilted = false;
    double residual = 0.0;        // max_x |sum_y g(x,y) e(y) - 1| over M (dense route)
    double tol = 0.0;             // achieved accuracy of the Green data used
    double weight(const Site& x) const {
        const int i = support.index_of(x);
        return i < 0 ? 0.0 : weights[i];
    }
};

EquilibriumMeasure equilibrium_and_capacity(const SiteSet& M, double tol = 1e-8);

// (1/2) sum over ordered nearest-neighbour pairs of (1/2d)(fn(y) - fn(x))^2, fn = 0 off the support
double dirichlet_form(const SiteSet& support, const std::vector<double>& values);

struct EntranceMeasure {
    SiteSet A;
    std::vector<double> mass;  // P_x[H_A < T_B, X_{H_A} = y] per site of A
    double no_entry = 0.0;     // P_x[T_B < H_A] (or P_x[H_A = infinity])
};

// B == nullptr means the whole lattice
EntranceMeasure entrance_measure(const SiteSet& A, const SiteSet* B, const Site& x);
// h_{A,B}(x, z) for many starting points; rows follow xs, columns follow A's order
Eigen::MatrixXd entrance_kernel(const SiteSet& A, const SiteSet& B, const std::vector<Site>& xs);
Eigen::MatrixXd entrance_kernel_free(const SiteSet& A, const std::vector<Site>& xs);

// sum_{y in B} g(x,y)
double expected_occupation(const Site& x, const SiteSet& B);

double sweeping_residual(const SiteSet& M, const SiteSet& Mp);

// Sites where the tilted conductances differ from 1/2d, plus their neighbours.
SiteSet tilt_coupling_set(const TiltProfile& prof);

// Exact g~ on M via the finite-rank correction of the free Green function on S = M u tilt closure.
// Throws when |S| exceeds max_dense.
GreenTable tilted_green_table(const SiteSet& M, const TiltProfile& prof, int max_dense = 8000);

// Grid solve with the free Green function as Dirichlet data on the faces of B_inf(0, R); columns for y in M.
GreenTable tilted_green_matched(const SiteSet& M, const TiltProfile& prof, int R);

// Escape potential phi(x) = P~_x[H_M < infinity] on a box centred at the origin, with the far field
// matched to cap~ * g(., centroid). Gives cap~, e~ on M and phi on the box.
struct EscapePotential {
    BoxIndex box;
    std::vector<double> phi;
    SiteSet M;
    std::vector<double> weights;  // e~_M per site of M
    double capacity = 0.0;
    Site pole;
    double value(const Site& x) const;
};
EscapePotential escape_potential(const SiteSet& M, const TiltProfile& prof, int R);

// smallest radius >= need among the box radii the grid solver coarsens cleanly
int next_solver_radius(int need);

struct TiltedCapacity {
    EquilibriumMeasure measure;
    double capacity_small_R = 0.0;  // certificate: value at the smaller radius
    std::vector<int> radii;
};

// Dense route when M u tilt closure is small enough, network escape potential at two radii otherwise.
TiltedCapacity tilted_equilibrium_and_capacity(const SiteSet& M, const TiltProfile& prof, double tol = 1e-6,
                                              int max_dense = 6000, std::vector<int> radii = {});

// Occupation identity for M inside the plateau: both sides computed with killed solves on B_inf(0,R).
struct OccupationIdentity {
    double tilted_occupation = 0.0;    // sum_{v,y} e~(v) g~(v,y) lambda(y)
    double tilted_target = 0.0;        // sum_{y in M} lambda(y)
    double standard_occupation = 0.0;  // sum_{v,y} e(v) g(v,y)
    double standard_target = 0.0;      // |M|
    double plateau_target = 0.0;       // plateau^2 |M|
    double residual = 0.0;             // largest relative deviation among the three comparisons
};
OccupationIdentity occupation_identity(const SiteSet& M, const TiltProfile& prof, int R);

}  // namespace ril
