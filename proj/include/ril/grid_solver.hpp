#pragma once

#include <vector>

#include "ril/lattice.hpp"

namespace ril {

// Weighted graph Laplacian on a box of Z^d,
//   (A u)(x) = sum_{y ~ x} c(x,y) (u(x) - u(y)),   c(x,y) = w(x) w(y) / (2d),
// with Dirichlet data on `fixed` nodes. The outermost layer of the box is always fixed.
// w = 1 gives I - P for the simple walk; w = f gives the tilted network with reversing measure f^2.
struct GridSystem {
    BoxIndex box;
    std::vector<double> w;     // node weights, empty means all ones
    std::vector<char> fixed;   // Dirichlet flag per node
    std::vector<double> u;     // Dirichlet data on fixed nodes, solution elsewhere
    std::vector<double> rhs;   // source term on free nodes

    explicit GridSystem(const BoxIndex& b);
    void fix_outer_layer(double value = 0.0);
    double weight(long long k) const { return w.empty() ? 1.0 : w[k]; }
    // A u at an interior node (fixed or not)
    double apply_at(long long k) const;
};

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

// Multigrid-preconditioned conjugate gradients for the free nodes.
SolveStats solve(GridSystem& sys, double rel_tol = 1e-12, int max_iter = 500);

}  // namespace ril
