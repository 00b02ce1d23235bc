#include "ril/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ril {

Site::Site(std::initializer_list<int> xs) {
    if (xs.size() > static_cast<std::size_t>(kMaxDim)) throw std::invalid_argument("dimension exceeds kMaxDim");
    d = static_cast<int>(xs.size());
    int i = 0;
    for (int x : xs) c[i++] = x;
}

Site Site::from_vector(const std::vector<int>& xs) {
    if (xs.size() > static_cast<std::size_t>(kMaxDim)) throw std::invalid_argument("dimension exceeds kMaxDim");
    Site s;
    s.d = static_cast<int>(xs.size());
    for (int i = 0; i < s.d; ++i) s.c[i] = xs[i];
    return s;
}

Site Site::operator+(const Site& o) const {
    Site s = *this;
    for (int i = 0; i < d; ++i) s.c[i] += o.c[i];
    return s;
}

Site Site::operator-(const Site& o) const {
    Site s = *this;
    for (int i = 0; i < d; ++i) s.c[i] -= o.c[i];
    return s;
}

bool Site::operator<(const Site& o) const {
    if (d != o.d) return d < o.d;
    for (int i = 0; i < d; ++i)
        if (c[i] != o.c[i]) return c[i] < o.c[i];
    return false;
}

long long Site::norm1() const {
    long long s = 0;
    for (int i = 0; i < d; ++i) s += std::abs(c[i]);
    return s;
}

int Site::norm_inf() const {
    int m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(c[i]));
    return m;
}

long long Site::norm2_sq() const {
    long long s = 0;
    for (int i = 0; i < d; ++i) s += static_cast<long long>(c[i]) * c[i];
    return s;
}

std::string Site::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << c[i];
    os << ')';
    return os.str();
}

SiteSet::SiteSet(int dim, const std::vector<Site>& sites) : d_(dim) {
    for (const auto& s : sites) insert(s);
}

bool SiteSet::insert(const Site& s) {
    if (s.d != d_) throw std::invalid_argument("site dimension " + std::to_string(s.d) + " does not match set dimension " + std::to_string(d_));
    auto [it, fresh] = index_.emplace(s, static_cast<int>(sites_.size()));
    if (fresh) sites_.push_back(s);
    return fresh;
}

int SiteSet::index_of(const Site& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

SiteSet SiteSet::sorted() const {
    std::vector<Site> v = sites_;
    std::sort(v.begin(), v.end());
    return SiteSet(d_, v);
}

bool SiteSet::operator==(const SiteSet& o) const {
    if (size() != o.size()) return false;
    for (const auto& s : sites_)
        if (!o.contains(s)) return false;
    return true;
}

SiteSet set_union(const SiteSet& a, const SiteSet& b) {
    SiteSet r = a;
    for (const auto& s : b) r.insert(s);
    return r;
}

SiteSet set_difference(const SiteSet& a, const SiteSet& b) {
    SiteSet r(a.dim());
    for (const auto& s : a)
        if (!b.contains(s)) r.insert(s);
    return r;
}

SiteSet set_intersection(const SiteSet& a, const SiteSet& b) {
    SiteSet r(a.dim());
    for (const auto& s : a)
        if (b.contains(s)) r.insert(s);
    return r;
}

bool is_subset(const SiteSet& a, const SiteSet& b) {
    for (const auto& s : a)
        if (!b.contains(s)) return false;
    return true;
}

void ShapeSpec::validate() const {
    if (center.empty() || center.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("shape center has unsupported dimension");
    if (kind != ShapeKind::point && !(size > 0.0))
        throw std::invalid_argument("shape radius/half-side must be positive");
}

bool ShapeSpec::centered() const {
    for (double c : center)
        if (c != 0.0) return false;
    return true;
}

BoxIndex::BoxIndex(const Site& lo, const Site& hi) : lo_(lo), hi_(hi) {
    if (lo.d != hi.d) throw std::invalid_argument("box corner dimensions differ");
    long long s = 1;
    for (int i = lo.d - 1; i >= 0; --i) {
        if (hi[i] < lo[i]) throw std::invalid_argument("empty box");
        stride_[i] = s;
        s *= hi[i] - lo[i] + 1;
    }
    size_ = s;
}

BoxIndex BoxIndex::cube(int d, int radius, const Site* center) {
    Site lo = Site::zero(d), hi = Site::zero(d);
    for (int i = 0; i < d; ++i) {
        int c = center ? (*center)[i] : 0;
        lo[i] = c - radius;
        hi[i] = c + radius;
    }
    return BoxIndex(lo, hi);
}

Site BoxIndex::site(long long k) const {
    Site s = lo_;
    for (int i = 0; i < lo_.d; ++i) {
        s[i] = lo_[i] + static_cast<int>(k / stride_[i]);
        k %= stride_[i];
    }
    return s;
}

bool BoxIndex::on_face(long long k) const {
    for (int i = 0; i < lo_.d; ++i) {
        long long q = (k / stride_[i]) % (hi_[i] - lo_[i] + 1);
        if (q == 0 || q == hi_[i] - lo_[i]) return true;
    }
    return false;
}

SiteSet box_sites(const BoxSpec& b) {
    const int d = b.center.d;
    const int r = static_cast<int>(std::floor(b.radius));
    BoxIndex box = BoxIndex::cube(d, r, &b.center);
    SiteSet out(d);
    const double r2 = b.radius * b.radius;
    for (long long k = 0; k < box.size(); ++k) {
        Site s = box.site(k);
        if (b.norm == Norm::euclidean && static_cast<double>((s - b.center).norm2_sq()) > r2) continue;
        out.insert(s);
    }
    return out;
}

SiteSet sup_ball(int d, int radius, const Site* center) {
    BoxSpec b{center ? *center : Site::zero(d), static_cast<double>(radius), Norm::sup};
    return box_sites(b);
}

SiteSet euclid_ball(const Site& center, double radius) {
    return box_sites(BoxSpec{center, radius, Norm::euclidean});
}

bool within_sup_distance(const ShapeSpec& shape, double N, const Site& x, double t) {
    // Euclidean distance between the cube B_inf(x, t) and N * core, compared with N * fatten
    const int d = shape.dim();
    double s = 0.0;
    const double half = shape.kind == ShapeKind::box ? N * shape.size : 0.0;
    for (int i = 0; i < d; ++i) {
        const double gap = std::abs(x[i] - N * shape.center[i]) - half - t;
        if (gap > 0) s += gap * gap;
    }
    double dist = std::sqrt(s);
    if (shape.kind == ShapeKind::ball) dist = std::max(0.0, dist - N * shape.size);
    return dist <= N * shape.fatten;
}

double core_distance(const ShapeSpec& shape, const double* z) {
    const int d = shape.dim();
    double s = 0.0;
    const double half = shape.kind == ShapeKind::box ? shape.size : 0.0;
    for (int i = 0; i < d; ++i) {
        const double gap = std::abs(z[i] - shape.center[i]) - half;
        if (gap > 0) s += gap * gap;
    }
    double dist = std::sqrt(s);
    if (shape.kind == ShapeKind::ball) dist = std::max(0.0, dist - shape.size);
    return dist;
}

SiteSet blow_up(const ShapeSpec& shape, int N) {
    shape.validate();
    if (N < 1) throw std::invalid_argument("blow_up requires N >= 1");
    const int d = shape.dim();
    Site lo = Site::zero(d), hi = Site::zero(d);
    for (int i = 0; i < d; ++i) {
        const double c = N * shape.center[i];
        const double ext = N * (shape.size + shape.fatten) + 1.0;
        lo[i] = static_cast<int>(std::floor(c - ext)) - 1;
        hi[i] = static_cast<int>(std::ceil(c + ext)) + 1;
    }
    BoxIndex box(lo, hi);
    SiteSet out(d);
    for (long long k = 0; k < box.size(); ++k) {
        Site s = box.site(k);
        if (within_sup_distance(shape, N, s, 1.0)) out.insert(s);
    }
    return out;
}

Boundaries boundaries(const SiteSet& S) {
    const int d = S.dim();
    Boundaries b{SiteSet(d), SiteSet(d), S};
    for (const auto& s : S) {
        bool inner = false;
        for (int k = 0; k < 2 * d; ++k) {
            Site t = s.neighbor(k);
            if (!S.contains(t)) {
                inner = true;
                b.outer.insert(t);
            }
        }
        if (inner) b.inner.insert(s);
    }
    for (const auto& s : b.outer) b.closure.insert(s);
    return b;
}

bool connected(const SiteSet& K, const SiteSet& L, const SiteSet& allowed) {
    const int d = allowed.dim();
    std::deque<Site> q;
    SiteSet seen(d);
    for (const auto& s : K) {
        if (!allowed.contains(s)) continue;
        if (L.contains(s)) return true;
        if (seen.insert(s)) q.push_back(s);
    }
    while (!q.empty()) {
        Site s = q.front();
        q.pop_front();
        for (int k = 0; k < 2 * d; ++k) {
            Site t = s.neighbor(k);
            if (!allowed.contains(t) || seen.contains(t)) continue;
            if (L.contains(t)) return true;
            seen.insert(t);
            q.push_back(t);
        }
    }
    return false;
}

bool disconnection_indicator(const SiteSet& K_set, const SiteSet& window_inner_boundary,
                             const SiteSet& occupied, const SiteSet& window) {
    for (const auto& s : K_set)
        if (window_inner_boundary.contains(s))
            throw std::invalid_argument("K_set meets the window inner boundary at " + s.str());
    SiteSet vacant = set_difference(window, occupied);
    return !connected(K_set, window_inner_boundary, vacant);
}

bool disconnected_in_box(const BoxIndex& box, const std::vector<long long>& sources,
                         const std::vector<char>& target, const std::vector<char>& blocked,
                         std::vector<long long>& queue, std::vector<char>& seen) {
    const int d = box.dim();
    seen.assign(static_cast<std::size_t>(box.size()), 0);
    queue.clear();
    for (long long k : sources) {
        if (blocked[k] || seen[k]) continue;
        if (target[k]) return false;
        seen[k] = 1;
        queue.push_back(k);
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const long long k = queue[head++];
        // target sites lie on or inside the box faces, so a blocked/box-edge check suffices
        for (int i = 0; i < d; ++i) {
            const long long st = box.stride(i);
            const long long q = (k / st) % box.extent(i);
            if (q + 1 < box.extent(i)) {
                const long long j = k + st;
                if (!blocked[j] && !seen[j]) {
                    if (target[j]) return false;
                    seen[j] = 1;
                    queue.push_back(j);
                }
            }
            if (q > 0) {
                const long long j = k - st;
                if (!blocked[j] && !seen[j]) {
                    if (target[j]) return false;
                    seen[j] = 1;
                    queue.push_back(j);
                }
            }
        }
    }
    return true;
}

void write_siteset(std::ostream& os, const SiteSet& S) {
    for (const auto& s : S) {
        for (int i = 0; i < s.d; ++i) os << (i ? " " : "") << s[i];
        os << '\n';
    }
}

SiteSet read_siteset(std::istream& is, int d) {
    SiteSet out(d);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<int> xs;
        int v;
        while (ls >> v) xs.push_back(v);
        if (static_cast<int>(xs.size()) != d)
            throw std::runtime_error("siteset line " + std::to_string(lineno) + ": expected " + std::to_string(d) + " coordinates");
        out.insert(Site::from_vector(xs));
    }
    return out;
}

}  // namespace ril
