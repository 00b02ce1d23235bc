#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace ril {

constexpr int kMaxDim = 6;

struct Site {
    std::array<int, kMaxDim> c{};
    int d = 0;

    Site() = default;
    static Site zero(int dim) { Site s; s.d = dim; return s; }
    Site(std::initializer_list<int> xs);
    static Site from_vector(const std::vector<int>& xs);

    int& operator[](int i) { return c[i]; }
    int operator[](int i) const { return c[i]; }

    // neighbor along direction k in [0, 2d): axis k/2, sign by parity
    Site neighbor(int k) const {
        Site s = *this;
        s.c[k >> 1] += (k & 1) ? -1 : 1;
        return s;
    }
    Site operator+(const Site& o) const;
    Site operator-(const Site& o) const;
    bool operator==(const Site& o) const { return d == o.d && c == o.c; }
    bool operator!=(const Site& o) const { return !(*this == o); }
    bool operator<(const Site& o) const;

    long long norm1() const;
    int norm_inf() const;
    long long norm2_sq() const;
    std::string str() const;
};

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(s.d);
        for (int i = 0; i < s.d; ++i) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.c[i])) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// Finite deduplicated set with insertion order and O(1) membership.
class SiteSet {
public:
    SiteSet() = default;
    explicit SiteSet(int dim) : d_(dim) {}
    SiteSet(int dim, const std::vector<Site>& sites);

    int dim() const { return d_; }
    bool insert(const Site& s);
    bool contains(const Site& s) const { return index_.count(s) != 0; }
    // -1 when absent
    int index_of(const Site& s) const;
    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const Site& operator[](std::size_t i) const { return sites_[i]; }
    const std::vector<Site>& sites() const { return sites_; }
    auto begin() const { return sites_.begin(); }
    auto end() const { return sites_.end(); }

    // canonical (lexicographic) order, used for reproducible output
    SiteSet sorted() const;
    bool operator==(const SiteSet& o) const;

private:
    int d_ = 0;
    std::vector<Site> sites_;
    std::unordered_map<Site, int, SiteHash> index_;
};

SiteSet set_union(const SiteSet& a, const SiteSet& b);
SiteSet set_difference(const SiteSet& a, const SiteSet& b);
SiteSet set_intersection(const SiteSet& a, const SiteSet& b);
bool is_subset(const SiteSet& a, const SiteSet& b);

enum class ShapeKind { point, ball, box };

struct ShapeSpec {
    ShapeKind kind = ShapeKind::point;
    double size = 0.0;  // radius for ball, half-side for box
    std::vector<double> center;
    double fatten = 0.0;  // closed Euclidean r-neighbourhood of the core shape

    int dim() const { return static_cast<int>(center.size()); }
    void validate() const;
    // true when the continuum shape is invariant under the hyperoctahedral group
    bool centered() const;
};

enum class Norm { euclidean, sup };

struct BoxSpec {
    Site center;
    double radius = 1.0;
    Norm norm = Norm::sup;
};

// Axis-aligned integer box [lo, hi] with a dense linear index.
class BoxIndex {
public:
    BoxIndex() = default;
    BoxIndex(const Site& lo, const Site& hi);
    static BoxIndex cube(int d, int radius, const Site* center = nullptr);

    int dim() const { return lo_.d; }
    const Site& lo() const { return lo_; }
    const Site& hi() const { return hi_; }
    int extent(int i) const { return hi_[i] - lo_[i] + 1; }
    long long stride(int i) const { return stride_[i]; }
    long long size() const { return size_; }

    bool contains(const Site& s) const {
        for (int i = 0; i < lo_.d; ++i)
            if (s[i] < lo_[i] || s[i] > hi_[i]) return false;
        return true;
    }
    long long index(const Site& s) const {
        long long k = 0;
        for (int i = 0; i < lo_.d; ++i) k += static_cast<long long>(s[i] - lo_[i]) * stride_[i];
        return k;
    }
    Site site(long long k) const;
    bool on_face(long long k) const;

private:
    Site lo_, hi_;
    std::array<long long, kMaxDim> stride_{};
    long long size_ = 0;
};

SiteSet box_sites(const BoxSpec& b);
SiteSet sup_ball(int d, int radius, const Site* center = nullptr);
SiteSet euclid_ball(const Site& center, double radius);

SiteSet blow_up(const ShapeSpec& shape, int N);
// sup-norm distance test d_inf(x, N * shape) <= t
bool within_sup_distance(const ShapeSpec& shape, double N, const Site& x, double t);
// Euclidean distance from a continuum point to the core (unfattened) shape
double core_distance(const ShapeSpec& shape, const double* z);

struct Boundaries {
    SiteSet outer, inner, closure;
};
Boundaries boundaries(const SiteSet& S);

bool connected(const SiteSet& K, const SiteSet& L, const SiteSet& allowed);

// window \ occupied must not connect K to the window's inner boundary
bool disconnection_indicator(const SiteSet& K_set, const SiteSet& window_inner_boundary,
                             const SiteSet& occupied, const SiteSet& window);

// Grid version for hot loops: sites are box indices, `blocked` marks occupied or outside-window.
bool disconnected_in_box(const BoxIndex& box, const std::vector<long long>& sources,
                         const std::vector<char>& target, const std::vector<char>& blocked,
                         std::vector<long long>& queue_scratch, std::vector<char>& seen_scratch);

void write_siteset(std::ostream& os, const SiteSet& S);
SiteSet read_siteset(std::istream& is, int d);

}  // namespace ril
