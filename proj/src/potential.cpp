#include "ril/potential.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ril/green.hpp"
#include "ril/grid_solver.hpp"

namespace ril {

std::string to_string(GreenFlavor f) {
    switch (f) {
        case GreenFlavor::free: return "free";
        case GreenFlavor::killed: return "killed";
        case GreenFlavor::tilted_free: return "tilted_free";
        case GreenFlavor::tilted_killed: return "tilted_killed";
    }
    return "?";
}

double GreenTable::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < i; ++j) {
            const double s = std::max(std::abs(values(i, j)), std::abs(values(j, i)));
            if (s > 0) m = std::max(m, std::abs(values(i, j) - values(j, i)) / s);
        }
    return m;
}

void GreenTable::write_csv(std::ostream& os) const {
    auto coords = [](const Site& s) {
        std::string r;
        for (int i = 0; i < s.d; ++i) r += (i ? " " : "") + std::to_string(s[i]);
        return r;
    };
    os << "# flavor=" << to_string(flavor) << " tol=" << tol << " units=time_per_unit_reversing_measure\n";
    os << "x,y,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = 0; j < sites.size(); ++j)
            os << coords(sites[i]) << ',' << coords(sites[j]) << ',' << values(i, j) << '\n';
}

Eigen::MatrixXd free_green_matrix(const std::vector<Site>& rows, const std::vector<Site>& cols) {
    if (rows.empty() || cols.empty()) return Eigen::MatrixXd(rows.size(), cols.size());
    const FreeGreen& g = FreeGreen::get(rows[0].d);
    Eigen::MatrixXd G(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) G(i, j) = g(rows[i], cols[j]);
    return G;
}

GreenTable free_green_table(const SiteSet& M) {
    if (M.size() == 0) throw std::invalid_argument("free_green_table: empty set");
    GreenTable t{M, free_green_matrix(M.sites(), M.sites()), GreenFlavor::free, FreeGreen::get(M.dim()).certified_tol()};
    return t;
}

struct KilledSolver::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

KilledSolver::KilledSolver(const SiteSet& U, const TiltProfile* prof) : U_(U), impl_(std::make_unique<Impl>()) {
    const int n = static_cast<int>(U.size());
    if (n == 0) throw std::invalid_argument("KilledSolver: empty domain");
    const int d = U.dim();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * (2 * d + 1));
    for (int i = 0; i < n; ++i) {
        const Site& x = U[i];
        const double fx = prof ? prof->f(x) : 1.0;
        double diag = 0.0;
        for (int k = 0; k < 2 * d; ++k) {
            const Site y = x.neighbor(k);
            const double c = fx * (prof ? prof->f(y) : 1.0) / (2.0 * d);
            diag += c;
            const int j = U.index_of(y);
            if (j >= 0) trip.emplace_back(i, j, -c);
        }
        trip.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(L);
    if (impl_->ldlt.info() != Eigen::Success) throw std::runtime_error("KilledSolver: factorization failed");
}

KilledSolver::~KilledSolver() = default;

Eigen::MatrixXd KilledSolver::solve(const Eigen::MatrixXd& rhs) const { return impl_->ldlt.solve(rhs); }

Eigen::VectorXd KilledSolver::column(const Site& y) const {
    const int j = U_.index_of(y);
    if (j < 0) throw std::invalid_argument("KilledSolver::column: site outside the domain");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(U_.size());
    e[j] = 1.0;
    return solve(e);
}

namespace {

GreenTable dense_killed(const SiteSet& U, const TiltProfile* prof) {
    KilledSolver ks(U, prof);
    const int n = static_cast<int>(U.size());
    GreenTable t{U, ks.solve(Eigen::MatrixXd::Identity(n, n)), prof ? GreenFlavor::tilted_killed : GreenFlavor::killed, 0.0};
    // residual of L G = I as the achieved accuracy
    t.tol = t.max_asymmetry() * t.values.cwiseAbs().maxCoeff();
    return t;
}

}  // namespace

GreenTable killed_green_table(const SiteSet& U) { return dense_killed(U, nullptr); }

GreenTable tilted_killed_green_table(const SiteSet& U, const TiltProfile& prof) { return dense_killed(U, &prof); }

namespace {

// Solve G_AA e = 1 on the inner boundary; the residual is checked on all of M.
EquilibriumMeasure equilibrium_from_green(const SiteSet& M, const Eigen::MatrixXd& G, double green_tol, double tol,
                                          bool tilted) {
    const SiteSet A = boundaries(M).inner;
    std::vector<int> idx;
    for (const auto& s : A) idx.push_back(M.index_of(s));
    const int na = static_cast<int>(idx.size());
    Eigen::MatrixXd GAA(na, na);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) GAA(i, j) = 0.5 * (G(idx[i], idx[j]) + G(idx[j], idx[i]));
    Eigen::LLT<Eigen::MatrixXd> llt(GAA);
    if (llt.info() != Eigen::Success) throw std::runtime_error("equilibrium: Green matrix not positive definite");
    const Eigen::VectorXd eA = llt.solve(Eigen::VectorXd::Ones(na));

    EquilibriumMeasure em;
    em.support = M;
    em.weights.assign(M.size(), 0.0);
    em.tilted = tilted;
    em.tol = green_tol;
    for (int i = 0; i < na; ++i) {
        if (eA[i] < -10.0 * tol)
            throw std::runtime_error("equilibrium: negative weight " + std::to_string(eA[i]) + " at " + A[i].str() +
                                     " (Green data too inaccurate)");
        em.weights[idx[i]] = std::max(0.0, eA[i]);
    }
    long double tot = 0.0L;
    for (double w : em.weights) tot += w;
    em.total = static_cast<double>(tot);
    for (std::size_t x = 0; x < M.size(); ++x) {
        long double s = 0.0L;
        for (int i = 0; i < na; ++i) s += G(x, idx[i]) * eA[i];
        em.residual = std::max(em.residual, static_cast<double>(std::abs(s - 1.0L)));
    }
    return em;
}

}  // namespace

EquilibriumMeasure equilibrium_and_capacity(const SiteSet& M, double tol) {
    if (M.size() == 0) throw std::invalid_argument("equilibrium_and_capacity: empty set");
    const double gtol = FreeGreen::get(M.dim()).certified_tol();
    if (gtol > tol) throw std::runtime_error("equilibrium_and_capacity: Green table accuracy " + std::to_string(gtol) + " exceeds tol");
    const Eigen::MatrixXd G = free_green_matrix(M.sites(), M.sites());
    return equilibrium_from_green(M, G, gtol, tol, false);
}

double dirichlet_form(const SiteSet& support, const std::vector<double>& values) {
    if (values.size() != support.size()) throw std::invalid_argument("dirichlet_form: value count mismatch");
    const int d = support.dim();
    long double acc = 0.0L;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Site& x = support[i];
        for (int k = 0; k < 2 * d; ++k) {
            const int j = support.index_of(x.neighbor(k));
            const double diff = (j >= 0 ? values[j] : 0.0) - values[i];
            // pairs leaving the support are seen from one side only
            acc += (j >= 0 ? 1.0L : 2.0L) * diff * diff;
        }
    }
    return static_cast<double>(acc / (2.0L * 2.0L * d));
}

Eigen::MatrixXd entrance_kernel_free(const SiteSet& A, const std::vector<Site>& xs) {
    const Eigen::MatrixXd GAA = free_green_matrix(A.sites(), A.sites());
    const Eigen::MatrixXd GxA = free_green_matrix(xs, A.sites());
    Eigen::LLT<Eigen::MatrixXd> llt(GAA);
    if (llt.info() != Eigen::Success) throw std::runtime_error("entrance_kernel_free: Green matrix not positive definite");
    return llt.solve(GxA.transpose()).transpose();
}

Eigen::MatrixXd entrance_kernel(const SiteSet& A, const SiteSet& B, const std::vector<Site>& xs) {
    if (!is_subset(A, B)) throw std::invalid_argument("entrance_kernel: A must be a subset of B");
    const int d = A.dim();
    const SiteSet U = set_difference(B, A);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(xs.size(), A.size());
    std::vector<int> rows_in_U(xs.size(), -1);
    for (std::size_t r = 0; r < xs.size(); ++r) {
        const int a = A.index_of(xs[r]);
        if (a >= 0) H(r, a) = 1.0;
        rows_in_U[r] = U.index_of(xs[r]);
    }
    if (U.size() == 0) return H;
    KilledSolver ks(U);
    // h(x,z) = (1/2d) sum over z' ~ z in U of g_U(x,z'), and g_U is symmetric
    SiteSet outer(d);
    for (const auto& z : A)
        for (int k = 0; k < 2 * d; ++k)
            if (U.contains(z.neighbor(k))) outer.insert(z.neighbor(k));
    for (const auto& zp : outer) {
        const Eigen::VectorXd col = ks.column(zp);
        for (int k = 0; k < 2 * d; ++k) {
            const int a = A.index_of(zp.neighbor(k));
            if (a < 0) continue;
            for (std::size_t r = 0; r < xs.size(); ++r)
                if (rows_in_U[r] >= 0) H(r, a) += col[rows_in_U[r]] / (2.0 * d);
        }
    }
    return H;
}

EntranceMeasure entrance_measure(const SiteSet& A, const SiteSet* B, const Site& x) {
    if (A.size() == 0) throw std::invalid_argument("entrance_measure: empty A");
    if (B && !B->contains(x)) throw std::invalid_argument("entrance_measure: x must lie in B");
    const Eigen::MatrixXd H = B ? entrance_kernel(A, *B, {x}) : entrance_kernel_free(A, {x});
    EntranceMeasure em{A, std::vector<double>(A.size()), 0.0};
    long double s = 0.0L;
    for (std::size_t j = 0; j < A.size(); ++j) {
        em.mass[j] = std::max(0.0, H(0, j));
        s += em.mass[j];
    }
    em.no_entry = std::max(0.0, static_cast<double>(1.0L - s));
    return em;
}

double expected_occupation(const Site& x, const SiteSet& B) {
    const FreeGreen& g = FreeGreen::get(x.d);
    long double s = 0.0L;
    for (const auto& y : B) s += g(x, y);
    return static_cast<double>(s);
}

double sweeping_residual(const SiteSet& M, const SiteSet& Mp) {
    if (!is_subset(M, Mp)) throw std::invalid_argument("sweeping_residual: M must be a subset of M'");
    const EquilibriumMeasure eM = equilibrium_and_capacity(M, 1e-6);
    const EquilibriumMeasure eMp = equilibrium_and_capacity(Mp, 1e-6);
    const Eigen::MatrixXd H = entrance_kernel_free(M, Mp.sites());
    double r = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < Mp.size(); ++i) s += eMp.weights[i] * H(i, j);
        r = std::max(r, static_cast<double>(std::abs(s - eM.weights[j])));
    }
    return r;
}

SiteSet tilt_coupling_set(const TiltProfile& prof) { return prof.tilt_closure(); }

GreenTable tilted_green_table(const SiteSet& M, const TiltProfile& prof, int max_dense) {
    const int d = M.dim();
    SiteSet S = set_union(M, tilt_coupling_set(prof));
    if (static_cast<int>(S.size()) > max_dense)
        throw std::runtime_error("tilted_green_table: correction set has " + std::to_string(S.size()) + " sites, above " +
                                 std::to_string(max_dense));
    const int n = static_cast<int>(S.size());
    const Eigen::MatrixXd G = free_green_matrix(S.sites(), S.sites());
    // D = L~ - L_0 lives on the edges with both endpoints in S
    std::vector<Eigen::Triplet<double>> trip;
    const double c0 = 1.0 / (2.0 * d);
    double dnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        const Site& x = S[i];
        const double fx = prof.f(x);
        double row = 0.0;
        for (int k = 0; k < 2 * d; ++k) {
            const Site y = x.neighbor(k);
            const double dc = fx * prof.f(y) * c0 - c0;
            if (dc == 0.0) continue;
            const int j = S.index_of(y);
            if (j < 0) throw std::logic_error("tilted_green_table: coupling set not closed");
            trip.emplace_back(i, i, dc);
            trip.emplace_back(i, j, -dc);
            row += 2.0 * std::abs(dc);
        }
        dnorm = std::max(dnorm, row);
    }
    Eigen::SparseMatrix<double> D(n, n);
    D.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd K = G * D;
    K.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    const Eigen::MatrixXd X = lu.solve(G);
    std::vector<int> idx;
    for (const auto& s : M) idx.push_back(S.index_of(s));
    GreenTable t{M, Eigen::MatrixXd(M.size(), M.size()), GreenFlavor::tilted_free, 0.0};
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M.size(); ++j) t.values(i, j) = X(idx[i], idx[j]);
    // first-order propagation of the Green table error through (I + G D)^{-1}
    const double kinv = 1.0 / (lu.rcond() * K.cwiseAbs().rowwise().sum().maxCoeff());
    t.tol = FreeGreen::get(d).certified_tol() * kinv * (1.0 + dnorm * X.cwiseAbs().rowwise().sum().maxCoeff());
    return t;
}

namespace {

void load_weights(GridSystem& sys, const TiltProfile& prof) {
    if (prof.is_trivial()) return;
    sys.w.resize(sys.box.size());
    for (long long k = 0; k < sys.box.size(); ++k) sys.w[k] = prof.f(sys.box.site(k));
}

std::vector<double> matched_column(const Site& y, const TiltProfile& prof, int R) {
    const int d = y.d;
    BoxIndex box = BoxIndex::cube(d, R + 1);
    GridSystem sys(box);
    load_weights(sys, prof);
    const FreeGreen& g = FreeGreen::get(d);
    for (long long k = 0; k < box.size(); ++k)
        if (sys.fixed[k]) sys.u[k] = g(box.site(k), y);
    sys.rhs[box.index(y)] = 1.0;
    solve(sys, 1e-12);
    return sys.u;
}

}  // namespace

GreenTable tilted_green_matched(const SiteSet& M, const TiltProfile& prof, int R) {
    GreenTable t{M, Eigen::MatrixXd(M.size(), M.size()), GreenFlavor::tilted_free, 0.0};
    BoxIndex box = BoxIndex::cube(M.dim(), R + 1);
    for (const auto& s : M)
        if (s.norm_inf() > R - 1) throw std::invalid_argument("tilted_green_matched: M not inside the solve box");
    for (std::size_t j = 0; j < M.size(); ++j) {
        const auto col = matched_column(M[j], prof, R);
        for (std::size_t i = 0; i < M.size(); ++i) t.values(i, j) = col[box.index(M[i])];
    }
    return t;
}

double EscapePotential::value(const Site& x) const {
    if (box.contains(x)) return phi[box.index(x)];
    return capacity * FreeGreen::get(x.d)(x, pole);
}

EscapePotential escape_potential(const SiteSet& M, const TiltProfile& prof, int R) {
    const int d = M.dim();
    if (M.size() == 0) throw std::invalid_argument("escape_potential: empty set");
    for (const auto& s : M)
        if (s.norm_inf() > R - 1) throw std::invalid_argument("escape_potential: M not inside the solve box");
    EscapePotential ep{BoxIndex::cube(d, R + 1), {}, M, std::vector<double>(M.size()), 0.0, Site::zero(d)};
    std::array<double, kMaxDim> cen{};
    for (const auto& s : M)
        for (int i = 0; i < d; ++i) cen[i] += s[i];
    for (int i = 0; i < d; ++i) ep.pole[i] = static_cast<int>(std::lround(cen[i] / M.size()));

    const FreeGreen& g = FreeGreen::get(d);
    auto run = [&](bool unit_on_M) {
        GridSystem sys(ep.box);
        load_weights(sys, prof);
        for (long long k = 0; k < ep.box.size(); ++k)
            if (sys.fixed[k]) sys.u[k] = unit_on_M ? 0.0 : g(ep.box.site(k), ep.pole);
        for (const auto& s : M) {
            const long long k = ep.box.index(s);
            sys.fixed[k] = 1;
            sys.u[k] = unit_on_M ? 1.0 : 0.0;
        }
        solve(sys, 1e-12);
        return sys;
    };
    GridSystem a = run(true);
    GridSystem b = run(false);
    long double Qa = 0.0L, Qb = 0.0L;
    for (const auto& s : M) {
        const long long k = ep.box.index(s);
        Qa += a.apply_at(k);
        Qb += b.apply_at(k);
    }
    const double t = static_cast<double>(Qa / (1.0L - Qb));
    ep.capacity = t;
    ep.phi.resize(ep.box.size());
    for (long long k = 0; k < ep.box.size(); ++k) ep.phi[k] = a.u[k] + t * b.u[k];
    for (std::size_t i = 0; i < M.size(); ++i) {
        const long long k = ep.box.index(M[i]);
        ep.weights[i] = a.apply_at(k) + t * b.apply_at(k);
    }
    return ep;
}

namespace {

// radii whose boxes coarsen cleanly in the multigrid

}  // namespace

int next_solver_radius(int need) {
    for (int R : {15, 23, 31, 47, 63, 95, 127})
        if (R >= need) return R;
    throw std::runtime_error("required solve radius " + std::to_string(need) + " too large");
}

TiltedCapacity tilted_equilibrium_and_capacity(const SiteSet& M, const TiltProfile& prof, double tol, int max_dense,
                                              std::vector<int> radii) {
    TiltedCapacity out;
    const SiteSet S = set_union(M, tilt_coupling_set(prof));
    if (radii.empty() && static_cast<int>(S.size()) <= max_dense) {
        const GreenTable gt = tilted_green_table(M, prof, max_dense);
        out.measure = equilibrium_from_green(M, gt.values, gt.tol, tol, true);
        out.capacity_small_R = out.measure.total;
        return out;
    }
    if (radii.empty()) {
        int need = prof.support_radius() + 4;
        for (const auto& s : M) need = std::max(need, s.norm_inf() + 4);
        const int R1 = next_solver_radius(need);
        radii = {R1, next_solver_radius(R1 + 1)};
    }
    std::sort(radii.begin(), radii.end());
    const EscapePotential small = escape_potential(M, prof, radii.front());
    const EscapePotential big = escape_potential(M, prof, radii.back());
    out.radii = radii;
    out.capacity_small_R = small.capacity;
    EquilibriumMeasure& em = out.measure;
    em.support = M;
    em.weights = big.weights;
    em.total = big.capacity;
    em.tilted = true;
    em.tol = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        em.tol = std::max(em.tol, std::abs(big.weights[i] - small.weights[i]));
        if (big.weights[i] < -10.0 * tol)
            throw std::runtime_error("tilted equilibrium: negative weight at " + M[i].str());
        em.weights[i] = std::max(0.0, em.weights[i]);
    }
    em.residual = std::abs(big.capacity - small.capacity);
    return out;
}

OccupationIdentity occupation_identity(const SiteSet& M, const TiltProfile& prof, int R) {
    const int d = M.dim();
    for (const auto& s : M)
        if (s.norm_inf() > R - 1) throw std::invalid_argument("occupation_identity: M not inside the killing box");
    const BoxIndex box = BoxIndex::cube(d, R + 1);
    auto occupation = [&](const TiltProfile& p) {
        GridSystem a(box);
        load_weights(a, p);
        for (const auto& s : M) {
            const long long k = box.index(s);
            a.fixed[k] = 1;
            a.u[k] = 1.0;
        }
        solve(a, 1e-13);
        GridSystem b(box);
        load_weights(b, p);
        for (const auto& s : M) {
            const long long k = box.index(s);
            b.rhs[k] = a.apply_at(k);
        }
        solve(b, 1e-13);
        long double occ = 0.0L;
        for (const auto& s : M) occ += p.lambda(s) * b.u[box.index(s)];
        return static_cast<double>(occ);
    };
    OccupationIdentity r;
    r.tilted_occupation = occupation(prof);
    r.standard_occupation = occupation(*TiltProfile::trivial(d));
    long double lam = 0.0L;
    for (const auto& s : M) lam += prof.lambda(s);
    r.tilted_target = static_cast<double>(lam);
    r.standard_target = static_cast<double>(M.size());
    r.plateau_target = prof.plateau() * prof.plateau() * M.size();
    r.residual = std::max({std::abs(r.tilted_occupation - r.tilted_target) / r.tilted_target,
                           std::abs(r.standard_occupation - r.standard_target) / r.standard_target,
                           std::abs(r.tilted_target - r.plateau_target) / r.plateau_target});
    return r;
}

}  // namespace ril
