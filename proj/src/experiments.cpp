#include "ril/experiments.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ril/green.hpp"
#include "ril/potential.hpp"
#include "ril/walk.hpp"

namespace ril {

namespace {

constexpr double kZ95 = 1.959963984540054;

// stream blocks, so different drivers in one run never share random numbers
constexpr std::uint64_t kDirectStreams = 1ull << 48;
constexpr std::uint64_t kTiltedStreams = 2ull << 48;
constexpr std::uint64_t kCouplingStreams = 3ull << 48;
constexpr std::uint64_t kBetaStreams = 4ull << 48;
constexpr std::uint64_t kFenceStreams = 5ull << 48;

std::shared_ptr<const TiltProfile> profile_at(const ExperimentConfig& cfg, int N, bool materialize = true) {
    TiltParams p = cfg.tilt;
    p.N = N;
    p.validate();
    return TiltProfile::build(p, materialize);
}

int extent_inf(const SiteSet& S) {
    int m = 0;
    for (const auto& s : S) m = std::max(m, s.norm_inf());
    return m;
}

void check_bias(EstimatorResult& r) {
    if (r.estimate > 0 && r.bias_bound > 0.01 * std::abs(r.estimate)) {
        if (!r.note.empty()) r.note += "; ";
        r.note += "escape bias bound above 1% of the estimate";
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    tilt.validate();
    if (!(0 < 2 * r1 && 2 * r1 < r2 && r2 < r3 && r3 < r4 && r4 < 1))
        throw std::invalid_argument("exponent ordering 0 < 2 r1 < r2 < r3 < r4 < 1 violated");
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    if (!(escape_tol > 0)) throw std::invalid_argument("escape_tol must be positive");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (gamma_samples < 1) throw std::invalid_argument("gamma_samples must be >= 1");
    for (int N : N_list)
        if (N < 1) throw std::invalid_argument("N_list entries must be >= 1");
    for (int R : window_radii)
        if (R < 2) throw std::invalid_argument("window radii must be >= 2");
}

int ExperimentConfig::window_for(const TiltProfile& prof) const {
    const SiteSet K = blow_up(prof.params().shape, prof.params().N);
    int need = extent_inf(K) + 2;
    if (!prof.is_trivial()) need = std::max(need, prof.support_radius() + 1);
    const int R = window_radius > 0 ? window_radius : need;
    if (R < need)
        throw std::invalid_argument("window radius " + std::to_string(R) + " does not contain K_N and the tilt closure (needs " +
                                    std::to_string(need) + ")");
    return R;
}

DisconnectionProbe::DisconnectionProbe(const BoxIndex& window, const SiteSet& K) : box_(window) {
    target_.assign(static_cast<std::size_t>(box_.size()), 0);
    for (long long k = 0; k < box_.size(); ++k)
        if (box_.on_face(k)) target_[k] = 1;
    for (const auto& s : K) {
        if (!box_.contains(s)) throw std::invalid_argument("K_N does not fit in the window");
        const long long k = box_.index(s);
        if (target_[k]) throw std::invalid_argument("K_N meets the inner boundary of the window");
        sources_.push_back(k);
    }
}

bool DisconnectionProbe::operator()(const std::vector<char>& occupied) const {
    thread_local std::vector<long long> queue;
    thread_local std::vector<char> seen;
    return disconnected_in_box(box_, sources_, target_, occupied, queue, seen);
}

namespace {

std::vector<int> direct_radii(const ExperimentConfig& cfg, int N) {
    std::vector<int> radii;
    if (cfg.window_radius > 0) {
        radii.push_back(cfg.window_radius);
    } else {
        radii.push_back(cfg.window_for(*profile_at(cfg, N, false)));
    }
    for (int R : cfg.window_radii)
        if (std::find(radii.begin(), radii.end(), R) == radii.end()) radii.push_back(R);
    return radii;
}

}  // namespace

std::vector<DirectRow> disconnect_direct(const ExperimentConfig& cfg, double u, int N) {
    return disconnect_direct_levels(cfg, {u}, N);
}

std::vector<DirectRow> disconnect_direct_levels(const ExperimentConfig& cfg, const std::vector<double>& levels, int N) {
    cfg.validate();
    if (levels.empty()) throw std::invalid_argument("no levels given");
    const SiteSet K = blow_up(cfg.tilt.shape, N);
    std::vector<DirectRow> rows;
    for (int R : direct_radii(cfg, N)) {
        const int d = cfg.tilt.d;
        InterlacementSampler sampler(sup_ball(d, R), nullptr, false, cfg.escape_tol, R);
        DisconnectionProbe probe(sampler.window(), K);
        const std::size_t L = levels.size();
        // one bit per level
        auto hits = run_replicas<std::uint32_t>(cfg.replicas, cfg.threads, cfg.seed, kDirectStreams,
                                                [&](long long, RngStream& rng) -> std::uint32_t {
                                                    std::uint32_t bits = 0;
                                                    if (L == 1) {
                                                        const auto s = sampler.sample(levels[0], rng, {false, false});
                                                        if (probe(s.trace)) bits = 1;
                                                        return bits;
                                                    }
                                                    const auto traces = sampler.sample_levels(levels, rng);
                                                    for (std::size_t l = 0; l < L; ++l)
                                                        if (probe(traces[l])) bits |= 1u << l;
                                                    return bits;
                                                });
        for (std::size_t l = 0; l < L; ++l) {
            long long k = 0;
            for (auto b : hits) k += (b >> l) & 1u;
            DirectRow row;
            row.window_radius = R;
            row.u = levels[l];
            row.result = frequency_result(k, cfg.replicas, cfg.seed, levels[l] * sampler.capacity() * sampler.escape_tol());
            check_bias(row.result);
            rows.push_back(row);
        }
    }
    return rows;
}

TiltedTrend disconnect_tilted(const ExperimentConfig& cfg, const std::vector<int>& N_list) {
    cfg.validate();
    TiltedTrend out;
    for (int N : N_list) {
        const auto prof = profile_at(cfg, N);
        const int R = cfg.window_for(*prof);
        InterlacementSampler sampler(sup_ball(cfg.tilt.d, R), prof, true, cfg.escape_tol, R);
        DisconnectionProbe probe(sampler.window(), prof->K_N());
        const double u = prof->params().u;
        auto hits = run_replicas<char>(cfg.replicas, cfg.threads, cfg.seed, kTiltedStreams + (static_cast<std::uint64_t>(N) << 32),
                                       [&](long long, RngStream& rng) -> char {
                                           return probe(sampler.sample(u, rng, {false, false}).trace) ? 1 : 0;
                                       });
        const long long k = std::accumulate(hits.begin(), hits.end(), 0LL);
        TiltedRow row;
        row.N = N;
        row.window_radius = R;
        row.result = frequency_result(k, cfg.replicas, cfg.seed, u * sampler.capacity() * sampler.escape_tol());
        check_bias(row.result);
        out.rows.push_back(row);
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        const auto& a = out.rows[i - 1].result;
        const auto& b = out.rows[i].result;
        const double diff = b.estimate - a.estimate;
        const double s = std::hypot(a.std_error, b.std_error);
        if (diff < 0) {
            out.nondecreasing = false;
            if (diff < -3.0 * s)
                out.violation = true;
            else
                out.inconclusive = true;
        }
    }
    return out;
}

ImportanceReport disconnect_is(const ExperimentConfig& cfg, int N) {
    cfg.validate();
    ImportanceReport rep;
    const auto prof = profile_at(cfg, N);
    const TiltParams& p = prof->params();
    const int R = cfg.window_for(*prof);
    rep.window_radius = R;
    InterlacementSampler sampler(sup_ball(p.d, R), prof, true, cfg.escape_tol, R);
    DisconnectionProbe probe(sampler.window(), prof->K_N());
    struct Draw {
        char hit = 0;
        double F = 0.0;
    };
    // the direct driver's streams: with f = 1 both estimators see the same samples
    auto draws = run_replicas<Draw>(cfg.replicas, cfg.threads, cfg.seed, kDirectStreams, [&](long long, RngStream& rng) {
        const auto s = sampler.sample(p.u, rng);
        return Draw{static_cast<char>(probe(s.trace) ? 1 : 0), s.F};
    });
    MeanAccumulator acc;
    long double sw = 0.0L, sw2 = 0.0L;
    long long hits = 0;
    for (const auto& d : draws) {
        const double w = d.hit ? std::exp(-d.F) : 0.0;
        acc.add(w);
        sw += w;
        sw2 += static_cast<long double>(w) * w;
        hits += d.hit;
    }
    const double bias = p.u * sampler.capacity() * sampler.escape_tol();
    rep.linear = mean_result(acc, cfg.seed, bias);
    rep.linear.ci_low = std::max(0.0, rep.linear.ci_low);
    check_bias(rep.linear);
    rep.tilted_frequency = frequency_result(hits, cfg.replicas, cfg.seed, bias);
    rep.ess = sw2 > 0 ? static_cast<double>(sw * sw / sw2) : 0.0;
    rep.unreliable = rep.ess < 30.0;

    EstimatorResult& lg = rep.log_result;
    lg.log_scale = true;
    lg.n = cfg.replicas;
    lg.seed = cfg.seed;
    lg.bias_bound = rep.linear.estimate > 0 ? bias / rep.linear.estimate : 0.0;
    if (rep.linear.estimate > 0) {
        lg.estimate = std::log(rep.linear.estimate);
        lg.std_error = rep.linear.std_error / rep.linear.estimate;
        lg.ci_low = lg.estimate - kZ95 * lg.std_error;
        lg.ci_high = lg.estimate + kZ95 * lg.std_error;
    } else {
        lg.estimate = -INFINITY;
        lg.ci_low = -INFINITY;
        lg.ci_high = std::log(rep.tilted_frequency.ci_high);
        lg.note = "no disconnection under the tilted law";
    }
    if (rep.unreliable) lg.note += std::string(lg.note.empty() ? "" : "; ") + "effective sample size below 30";

    rep.entropy = prof->is_trivial() ? 0.0 : entropy(*prof).H_formula;
    const double pt = rep.tilted_frequency.estimate;
    rep.entropy_bound = pt > 0 ? std::log(pt) - (rep.entropy + std::exp(-1.0)) / pt : -INFINITY;
    double capK = NAN;
    if (p.shape.kind == ShapeKind::point)
        capK = 0.0;
    else if (p.shape.kind == ShapeKind::ball)
        capK = std::pow(p.shape.size + p.shape.fatten, p.d - 2) / brownian_c0(p.d);
    const double gap = std::sqrt(p.u_star2) - std::sqrt(p.u);
    rep.asymptotic_target = -(1.0 / p.d) * gap * gap * capK * std::pow(static_cast<double>(N), p.d - 2);
    return rep;
}

std::vector<Site> fence_sample(const TiltProfile& prof, int count, std::uint64_t seed) {
    const SiteSet G = prof.Gamma_N().sorted();
    std::vector<Site> reps;
    const bool sym = prof.params().shape.centered();
    for (const auto& x : G) {
        bool canon = true;
        if (sym) {
            for (int i = 0; i < x.d && canon; ++i) {
                if (x[i] < 0) canon = false;
                if (i > 0 && x[i] > x[i - 1]) canon = false;
            }
        }
        if (canon) reps.push_back(x);
    }
    if (static_cast<int>(reps.size()) <= count) return reps;
    RngStream rng(seed, kFenceStreams);
    std::shuffle(reps.begin(), reps.end(), rng.engine());
    reps.resize(static_cast<std::size_t>(count));
    std::sort(reps.begin(), reps.end());
    return reps;
}

DominationReport domination_report(const ExperimentConfig& cfg, int N) {
    cfg.validate();
    const auto prof = profile_at(cfg, N);
    const TiltParams& p = prof->params();
    const int d = p.d;
    DominationReport rep;
    rep.N = N;
    rep.eps_prime = p.epsilon / (4.0 * p.u_star2 + 2.0 * p.epsilon);
    rep.radius_B1 = static_cast<int>(std::floor(std::pow(N, cfg.r1)));
    rep.radius_B3 = std::pow(N, cfg.r3);
    rep.radius_B4 = std::pow(N, cfg.r4);
    rep.gamma_size = prof->Gamma_N().size();
    if (rep.radius_B1 * std::sqrt(static_cast<double>(d)) + 1.0 >= rep.radius_B3 || rep.radius_B3 + 1.0 >= rep.radius_B4)
        throw std::invalid_argument("geometry infeasible at N = " + std::to_string(N) + ": need B1 inside B3 inside B4");

    const auto xs = fence_sample(*prof, cfg.gamma_samples, cfg.seed);
    rep.min_capacity_margin = rep.min_equilibrium_margin = rep.min_entrance_margin = INFINITY;
    for (const auto& x : xs) {
        DominationPoint pt;
        pt.x = x;
        const SiteSet B1 = sup_ball(d, rep.radius_B1, &x);
        const SiteSet B3 = euclid_ball(x, rep.radius_B3);
        const SiteSet B4 = euclid_ball(x, rep.radius_B4);

        pt.cap_B3 = equilibrium_and_capacity(B3).total;
        const TiltedCapacity t3 = tilted_equilibrium_and_capacity(B3, *prof);
        pt.tilted_cap_B3 = t3.measure.total;
        pt.certificate = std::abs(t3.measure.total - t3.capacity_small_R);
        pt.capacity_margin = p.u * pt.tilted_cap_B3 - (p.u_star2 + p.epsilon / 2) * pt.cap_B3;

        const EquilibriumMeasure e1 = equilibrium_and_capacity(B1);
        const TiltedCapacity t1 = tilted_equilibrium_and_capacity(B1, *prof);
        pt.certificate = std::max(pt.certificate, t1.measure.tol);
        const SiteSet inner1 = boundaries(B1).inner;
        pt.equilibrium_margin = INFINITY;
        for (const auto& z : inner1)
            pt.equilibrium_margin = std::min(pt.equilibrium_margin, p.u * t1.measure.weight(z) - (p.u_star2 + p.epsilon / 4) * e1.weight(z));

        const std::vector<Site> ys = boundaries(B3).inner.sorted().sites();
        const Eigen::MatrixXd killed = entrance_kernel(B1, B4, ys);
        const Eigen::MatrixXd free = entrance_kernel_free(B1, ys);
        pt.entrance_ratio = INFINITY;
        for (const auto& z : inner1) {
            const int j = B1.index_of(z);
            pt.entrance_ratio = std::min(pt.entrance_ratio, killed.col(j).minCoeff() / free.col(j).maxCoeff());
        }
        pt.entrance_margin = pt.entrance_ratio - (1.0 - rep.eps_prime);

        rep.min_capacity_margin = std::min(rep.min_capacity_margin, pt.capacity_margin);
        rep.min_equilibrium_margin = std::min(rep.min_equilibrium_margin, pt.equilibrium_margin);
        rep.min_entrance_margin = std::min(rep.min_entrance_margin, pt.entrance_margin);
        rep.points.push_back(pt);
    }
    if (!xs.empty()) {
        // the occupation identity needs a set inside the plateau: B1 around the first fence point
        const SiteSet B1 = sup_ball(d, rep.radius_B1, &xs.front());
        const int R = std::max(prof->support_radius() + 2, extent_inf(B1) + 2);
        rep.occupation_residual = occupation_identity(B1, *prof, R).residual;
    }
    return rep;
}

double alpha_N(int N, double c1, Site* argmax) {
    if (N < 1) throw std::invalid_argument("alpha_N: N must be >= 1");
    const int d = 3;
    const SiteSet B = euclid_ball(Site::zero(d), N);
    const long long N2 = static_cast<long long>(N) * N;
    // representatives of the inner boundary, x0 >= x1 >= x2 >= 0
    std::vector<Site> xs;
    for (const auto& x : boundaries(B).inner)
        if (x[0] >= x[1] && x[1] >= x[2] && x[2] >= 0) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    std::vector<double> dev(xs.size());
    const FreeGreen& g = FreeGreen::get(d);
    const std::vector<Site>& ys = B.sites();
    auto body = [&](std::size_t i) {
        long double s = 0.0L;
        for (const auto& y : ys) s += g(xs[i], y);
        dev[i] = std::abs(static_cast<double>(s) / (c1 * static_cast<double>(N2)) - 1.0);
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < hw; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < xs.size(); i += hw) body(i);
        });
    for (auto& th : pool) th.join();
    const auto it = std::max_element(dev.begin(), dev.end());
    if (argmax) *argmax = xs[static_cast<std::size_t>(it - dev.begin())];
    return *it;
}

AlphaBetaScan scan_alpha_beta(const ExperimentConfig& cfg, const std::vector<int>& N_list, double c1) {
    cfg.validate();
    if (cfg.tilt.d != 3) throw std::invalid_argument("scan_alpha_beta is implemented for d = 3");
    AlphaBetaScan out;
    for (int N : N_list) {
        AlphaBetaRow row;
        row.N = N;
        row.alpha = alpha_N(N, c1, &row.alpha_argmax);

        const auto prof = profile_at(cfg, N);
        const auto xs = fence_sample(*prof, 1, cfg.seed);
        if (xs.empty()) throw std::invalid_argument("empty fence at N = " + std::to_string(N));
        const Site& x = xs.front();
        const SiteSet B3 = euclid_ball(x, std::pow(N, cfg.r3));
        const SiteSet B4 = euclid_ball(x, std::pow(N, cfg.r4));
        const SiteSet outer4 = boundaries(B4).outer;
        const int R = next_solver_radius(std::max(prof->support_radius() + 4, extent_inf(outer4) + 4));
        const EscapePotential ep = escape_potential(B3, *prof, R);
        const EquilibriumMeasure e3 = equilibrium_and_capacity(B3);
        const FreeGreen& g = FreeGreen::get(3);
        Site worst = outer4[0];
        row.beta = -1.0;
        for (const auto& v : outer4) {
            const double b = ep.value(v);
            if (b > row.beta) {
                row.beta = b;
                worst = v;
            }
            long double s = 0.0L;
            for (std::size_t i = 0; i < B3.size(); ++i) s += g(v, B3[i]) * e3.weights[i];
            row.beta_plain = std::max(row.beta_plain, static_cast<double>(s));
        }
        if (cfg.beta_walks > 0) {
            // tilted walks from the worst start; escape is decided by the exit kernel of a box holding the tilt
            StopRule stop = StopRule::escape(B3, cfg.escape_tol);
            WalkOptions opt;
            opt.record_holding = false;
            opt.escape_radius = std::max(prof->support_radius() + 1, extent_inf(outer4) + 1);
            opt.escape_center = Site::zero(3);
            auto hit = run_replicas<char>(cfg.beta_walks, cfg.threads, cfg.seed, kBetaStreams + (static_cast<std::uint64_t>(N) << 32),
                                          [&](long long, RngStream& rng) -> char {
                                              const auto tr = sample_walk(worst, prof.get(), stop, rng, opt);
                                              return tr.terminal_reason == Terminal::hit_target ? 1 : 0;
                                          });
            const long long k = std::accumulate(hit.begin(), hit.end(), 0LL);
            const auto fr = frequency_result(k, cfg.beta_walks, cfg.seed);
            row.beta_mc = fr.estimate;
            row.beta_mc_se = fr.std_error;
        }
        out.rows.push_back(row);
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (!(out.rows[i].alpha < out.rows[i - 1].alpha)) out.alpha_decreasing = false;
        if (!(out.rows[i].beta < out.rows[i - 1].beta)) out.beta_decreasing = false;
    }
    return out;
}

CouplingReport coupling_check(const ExperimentConfig& cfg, int N, double level) {
    cfg.validate();
    const auto prof = profile_at(cfg, N);
    const TiltParams& p = prof->params();
    const int d = p.d;
    CouplingReport rep;
    rep.comparison_level = level >= 0 ? level : p.u_star2 + p.epsilon / 8;
    const auto xs = fence_sample(*prof, 1, cfg.seed);
    if (xs.empty()) throw std::invalid_argument("empty fence at N = " + std::to_string(N));
    rep.center = xs.front();
    const int r1 = static_cast<int>(std::floor(std::pow(N, cfg.r1)));
    const int r2 = static_cast<int>(std::floor(std::pow(N, cfg.r2)));
    const SiteSet B1 = sup_ball(d, r1, &rep.center).sorted();
    int Rt = cfg.window_for(*prof);
    if (cfg.window_radius <= 0) Rt = std::max(Rt, rep.center.norm_inf() + r2 + 1);
    if (rep.center.norm_inf() + r2 >= Rt) throw std::invalid_argument("B2 does not fit in the window");

    InterlacementSampler tilted(B1, prof, true, cfg.escape_tol, Rt);
    InterlacementSampler standard(B1, nullptr, false, cfg.escape_tol, extent_inf(B1) + 1);
    const std::size_t m = B1.size();
    auto restrict_to_B1 = [&](const InterlacementSample& s) {
        std::vector<char> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = s.trace[s.window.index(B1[i])];
        return v;
    };
    const std::uint64_t base = kCouplingStreams + (static_cast<std::uint64_t>(N) << 32);
    auto tr = run_replicas<std::vector<char>>(cfg.replicas, cfg.threads, cfg.seed, base, [&](long long, RngStream& rng) {
        return restrict_to_B1(tilted.sample(p.u, rng, {false, false}));
    });
    auto st = run_replicas<std::vector<char>>(cfg.replicas, cfg.threads, cfg.seed, base + (1ull << 31),
                                              [&](long long, RngStream& rng) {
                                                  return restrict_to_B1(standard.sample(rep.comparison_level, rng, {false, false}));
                                              });

    // panel of increasing events: single sites, pairs, triples, and trace-size exceedances
    std::vector<std::pair<std::string, std::function<bool(const std::vector<char>&)>>> events;
    auto pick = [&](std::size_t k, std::size_t of) { return (k * (m - 1)) / std::max<std::size_t>(of - 1, 1); };
    for (std::size_t k = 0; k < 8; ++k) {
        const std::size_t a = pick(k, 8);
        events.push_back({"site " + B1[a].str(), [a](const std::vector<char>& v) { return v[a] != 0; }});
    }
    for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t a = pick(k, 6), b = m - 1 - pick(k, 12);
        events.push_back({"pair " + B1[a].str() + " " + B1[b].str(), [a, b](const std::vector<char>& v) { return v[a] && v[b]; }});
    }
    for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t a = pick(k, 2), b = m / 2, c = pick(k + 1, 3);
        events.push_back({"triple " + B1[a].str() + " " + B1[b].str() + " " + B1[c].str(),
                          [a, b, c](const std::vector<char>& v) { return v[a] && v[b] && v[c]; }});
    }
    for (int q = 1; q <= 4; ++q) {
        const long long need = static_cast<long long>(std::ceil(m * q / 4.0));
        events.push_back({"trace size >= " + std::to_string(need), [need](const std::vector<char>& v) {
                              return std::count(v.begin(), v.end(), 1) >= need;
                          }});
    }
    for (const auto& [name, ev] : events) {
        long long kt = 0, ks = 0;
        for (const auto& v : tr) kt += ev(v);
        for (const auto& v : st) ks += ev(v);
        PanelEvent pe;
        pe.name = name;
        pe.tilted = frequency_result(kt, cfg.replicas, cfg.seed);
        pe.standard = frequency_result(ks, cfg.replicas, cfg.seed);
        pe.violation = pe.tilted.estimate + 3.0 * pe.tilted.std_error < pe.standard.estimate;
        rep.violations += pe.violation;
        rep.panel.push_back(pe);
    }
    MeanAccumulator mt, ms;
    for (const auto& v : tr) mt.add(static_cast<double>(std::count(v.begin(), v.end(), 1)));
    for (const auto& v : st) ms.add(static_cast<double>(std::count(v.begin(), v.end(), 1)));
    rep.tilted_trace_mean = mean_result(mt, cfg.seed);
    rep.standard_trace_mean = mean_result(ms, cfg.seed);
    rep.trace_mean_dominates =
        rep.tilted_trace_mean.estimate + 3.0 * std::hypot(rep.tilted_trace_mean.std_error, rep.standard_trace_mean.std_error) >=
        rep.standard_trace_mean.estimate;
    return rep;
}

}  // namespace ril
