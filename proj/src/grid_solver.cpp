#include "ril/grid_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace ril {

GridSystem::GridSystem(const BoxIndex& b)
    : box(b), fixed(static_cast<std::size_t>(b.size()), 0), u(static_cast<std::size_t>(b.size()), 0.0),
      rhs(static_cast<std::size_t>(b.size()), 0.0) {
    fix_outer_layer();
}

void GridSystem::fix_outer_layer(double value) {
    for (long long k = 0; k < box.size(); ++k)
        if (box.on_face(k)) {
            fixed[k] = 1;
            u[k] = value;
        }
}

double GridSystem::apply_at(long long k) const {
    const int d = box.dim();
    const double wk = weight(k);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const long long st = box.stride(i);
        s += weight(k + st) * (u[k] - u[k + st]) + weight(k - st) * (u[k] - u[k - st]);
    }
    return wk * s / (2.0 * d);
}

namespace {

struct Level {
    int d = 0;
    std::array<int, kMaxDim> n{};
    std::array<long long, kMaxDim> st{};
    long long size = 0;
    double scale = 1.0;
    std::vector<double> w;
    std::vector<char> fixed;
    std::vector<double> diag;
    std::vector<long long> color[2];
    std::vector<double> x, b, r;
    // dense solve on the coarsest level
    std::vector<long long> dense_nodes;
    std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> llt;

    void init_from_box(const BoxIndex& box) {
        d = box.dim();
        size = box.size();
        for (int i = 0; i < d; ++i) {
            n[i] = box.extent(i);
            st[i] = box.stride(i);
        }
    }

    void finalize() {
        diag.assign(size, 0.0);
        color[0].clear();
        color[1].clear();
        const double c0 = scale / (2.0 * d);
        for (long long k = 0; k < size; ++k) {
            if (fixed[k]) continue;
            double s = 0.0;
            long long parity = 0;
            long long rem = k;
            for (int i = 0; i < d; ++i) {
                s += w[k + st[i]] + w[k - st[i]];
                parity += rem / st[i];
                rem %= st[i];
            }
            diag[k] = c0 * w[k] * s;
            color[parity & 1].push_back(k);
        }
        x.assign(size, 0.0);
        b.assign(size, 0.0);
        r.assign(size, 0.0);
    }

    double Ax(const std::vector<double>& v, long long k) const {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += w[k + st[i]] * v[k + st[i]] + w[k - st[i]] * v[k - st[i]];
        return diag[k] * v[k] - scale / (2.0 * d) * w[k] * s;
    }

    void sweep(int c) {
        const double c0 = scale / (2.0 * d);
        for (long long k : color[c]) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += w[k + st[i]] * x[k + st[i]] + w[k - st[i]] * x[k - st[i]];
            x[k] = (b[k] + c0 * w[k] * s) / diag[k];
        }
    }

    void residual() {
        for (int c = 0; c < 2; ++c)
            for (long long k : color[c]) r[k] = b[k] - Ax(x, k);
    }

    void build_dense() {
        for (int c = 0; c < 2; ++c)
            for (long long k : color[c]) dense_nodes.push_back(k);
        std::sort(dense_nodes.begin(), dense_nodes.end());
        const int m = static_cast<int>(dense_nodes.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        std::vector<int> pos(size, -1);
        for (int i = 0; i < m; ++i) pos[dense_nodes[i]] = i;
        const double c0 = scale / (2.0 * d);
        for (int a = 0; a < m; ++a) {
            const long long k = dense_nodes[a];
            A(a, a) = diag[k];
            for (int i = 0; i < d; ++i)
                for (long long j : {k + st[i], k - st[i]})
                    if (pos[j] >= 0) A(a, pos[j]) -= c0 * w[k] * w[j];
        }
        llt = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(A);
    }

    void dense_solve() {
        const int m = static_cast<int>(dense_nodes.size());
        if (m == 0) return;
        Eigen::VectorXd rhs(m);
        for (int a = 0; a < m; ++a) rhs[a] = b[dense_nodes[a]];
        Eigen::VectorXd sol = llt->solve(rhs);
        for (int a = 0; a < m; ++a) x[dense_nodes[a]] = sol[a];
    }
};

bool coarsenable(const Level& L) {
    for (int i = 0; i < L.d; ++i) {
        const int m = L.n[i] - 2;
        if (m < 3 || (m % 2) == 0) return false;
    }
    return true;
}

long long free_count(const Level& L) { return static_cast<long long>(L.color[0].size() + L.color[1].size()); }

class Multigrid {
public:
    explicit Multigrid(const GridSystem& sys) {
        auto fine = std::make_unique<Level>();
        fine->init_from_box(sys.box);
        fine->w = sys.w.empty() ? std::vector<double>(sys.box.size(), 1.0) : sys.w;
        fine->fixed = sys.fixed;
        fine->finalize();
        levels_.push_back(std::move(fine));
        while (coarsenable(*levels_.back()) && free_count(*levels_.back()) > 512) {
            levels_.push_back(coarsen(*levels_.back()));
        }
        Level& last = *levels_.back();
        if (free_count(last) <= 6000) last.build_dense();
    }

    // z = B r on the fine level; B is symmetric positive definite
    void apply(const std::vector<double>& r, std::vector<double>& z) {
        Level& L0 = *levels_[0];
        for (long long k = 0; k < L0.size; ++k) L0.b[k] = L0.fixed[k] ? 0.0 : r[k];
        vcycle(0);
        z = L0.x;
    }

private:
    std::vector<std::unique_ptr<Level>> levels_;

    static std::unique_ptr<Level> coarsen(const Level& F) {
        auto C = std::make_unique<Level>();
        C->d = F.d;
        long long s = 1;
        for (int i = F.d - 1; i >= 0; --i) {
            C->n[i] = (F.n[i] + 1) / 2;
            C->st[i] = s;
            s *= C->n[i];
        }
        C->size = s;
        C->scale = F.scale / 4.0;
        C->w.assign(s, 1.0);
        C->fixed.assign(s, 0);
        for (long long J = 0; J < s; ++J) {
            long long rem = J, kf = 0;
            bool face = false;
            for (int i = 0; i < F.d; ++i) {
                const long long q = rem / C->st[i];
                rem %= C->st[i];
                if (q == 0 || q == C->n[i] - 1) face = true;
                kf += 2 * q * F.st[i];
            }
            C->w[J] = F.w[kf];
            C->fixed[J] = face ? 1 : F.fixed[kf];
        }
        C->finalize();
        return C;
    }

    // fine index of coarse node J
    static long long fine_of(const Level& F, const Level& C, long long J) {
        long long rem = J, kf = 0;
        for (int i = 0; i < C.d; ++i) {
            const long long q = rem / C.st[i];
            rem %= C.st[i];
            kf += 2 * q * F.st[i];
        }
        return kf;
    }

    void restrict_to(const Level& F, Level& C) {
        const int d = F.d;
        int noff = 1;
        for (int i = 0; i < d; ++i) noff *= 3;
        std::fill(C.b.begin(), C.b.end(), 0.0);
        for (int c = 0; c < 2; ++c)
            for (long long J : C.color[c]) {
                const long long kf = fine_of(F, C, J);
                double acc = 0.0;
                for (int o = 0; o < noff; ++o) {
                    int t = o;
                    long long off = 0;
                    double wt = 1.0;
                    for (int i = 0; i < d; ++i) {
                        const int oi = t % 3 - 1;
                        t /= 3;
                        off += oi * F.st[i];
                        wt *= oi == 0 ? 0.5 : 0.25;
                    }
                    acc += wt * F.r[kf + off];
                }
                C.b[J] = acc;
            }
    }

    void prolong_add(Level& F, const Level& C) {
        const int d = F.d;
        for (int c = 0; c < 2; ++c)
            for (long long k : F.color[c]) {
                // coordinates of k
                long long rem = k;
                std::array<long long, kMaxDim> q{};
                for (int i = 0; i < d; ++i) {
                    q[i] = rem / F.st[i];
                    rem %= F.st[i];
                }
                double acc = 0.0;
                const int ncomb = 1 << d;
                for (int m = 0; m < ncomb; ++m) {
                    long long J = 0;
                    double wt = 1.0;
                    bool skip = false;
                    for (int i = 0; i < d; ++i) {
                        const bool hi = (m >> i) & 1;
                        if (q[i] % 2 == 0) {
                            if (hi) { skip = true; break; }
                            J += (q[i] / 2) * C.st[i];
                        } else {
                            J += ((q[i] + (hi ? 1 : -1)) / 2) * C.st[i];
                            wt *= 0.5;
                        }
                    }
                    if (!skip) acc += wt * C.x[J];
                }
                F.x[k] += acc;
            }
    }

    void vcycle(std::size_t l) {
        Level& L = *levels_[l];
        if (l + 1 == levels_.size()) {
            if (L.llt) {
                L.dense_solve();
            } else {
                std::fill(L.x.begin(), L.x.end(), 0.0);
                for (int it = 0; it < 40; ++it) {
                    L.sweep(0);
                    L.sweep(1);
                    L.sweep(1);
                    L.sweep(0);
                }
            }
            return;
        }
        std::fill(L.x.begin(), L.x.end(), 0.0);
        L.sweep(0);
        L.sweep(1);
        L.sweep(0);
        L.sweep(1);
        L.residual();
        Level& C = *levels_[l + 1];
        restrict_to(L, C);
        vcycle(l + 1);
        prolong_add(L, C);
        L.sweep(1);
        L.sweep(0);
        L.sweep(1);
        L.sweep(0);
    }
};

}  // namespace

SolveStats solve(GridSystem& sys, double rel_tol, int max_iter) {
    const long long n = sys.box.size();
    for (long long k = 0; k < n; ++k)
        if (sys.box.on_face(k) && !sys.fixed[k]) throw std::logic_error("grid solve: outer layer must be Dirichlet");
    const int d = sys.box.dim();
    std::vector<double> w = sys.w.empty() ? std::vector<double>(n, 1.0) : sys.w;
    std::vector<long long> freen;
    for (long long k = 0; k < n; ++k)
        if (!sys.fixed[k]) freen.push_back(k);
    SolveStats stats;
    if (freen.empty()) return stats;

    auto A = [&](const std::vector<double>& v, long long k) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const long long st = sys.box.stride(i);
            s += w[k + st] * (v[k] - v[k + st]) + w[k - st] * (v[k] - v[k - st]);
        }
        return w[k] * s / (2.0 * d);
    };

    // residual with the current iterate (fixed data enters through A)
    std::vector<double> r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
    for (long long k : freen) r[k] = sys.rhs[k] - A(sys.u, k);
    double r0 = 0.0;
    for (long long k : freen) r0 += r[k] * r[k];
    r0 = std::sqrt(r0);
    double bnorm = 0.0;
    for (long long k : freen) bnorm += sys.rhs[k] * sys.rhs[k];
    const double ref = std::max(r0, std::sqrt(bnorm));
    if (ref == 0.0) return stats;

    Multigrid mg(sys);
    mg.apply(r, z);
    for (long long k : freen) p[k] = z[k];
    double rz = 0.0;
    for (long long k : freen) rz += r[k] * z[k];
    double rn = r0;
    int it = 0;
    while (rn > rel_tol * ref && it < max_iter) {
        ++it;
        for (long long k : freen) q[k] = A(p, k);
        double pq = 0.0;
        for (long long k : freen) pq += p[k] * q[k];
        const double alpha = rz / pq;
        rn = 0.0;
        for (long long k : freen) {
            sys.u[k] += alpha * p[k];
            r[k] -= alpha * q[k];
            rn += r[k] * r[k];
        }
        rn = std::sqrt(rn);
        if (rn <= rel_tol * ref) break;
        mg.apply(r, z);
        double rz_new = 0.0;
        for (long long k : freen) rz_new += r[k] * z[k];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (long long k : freen) p[k] = z[k] + beta * p[k];
    }
    stats.iterations = it;
    stats.rel_residual = rn / ref;
    if (rn > rel_tol * ref * 10)
        throw std::runtime_error("grid solve did not converge: relative residual " + std::to_string(stats.rel_residual));
    return stats;
}

}  // namespace ril
