#include "orbitchaos/dynamics/system.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include "orbitchaos/core/error.hpp"

namespace orbitchaos {

namespace {

constexpr std::uint64_t kMask53 = (std::uint64_t{1} << 53) - 1;

std::uint64_t to_fixed(double v) noexcept { return static_cast<std::uint64_t>(std::ldexp(wrap_unit(v), 53)) & kMask53; }
double from_fixed(std::uint64_t v) noexcept { return std::ldexp(static_cast<double>(v), -53); }

/// Planar state on the 2^-53 grid.
struct Fixed2 {
    std::uint64_t x;
    std::uint64_t y;
};

/// Baker step on binary expansions: the leading digit of x moves to the front
/// of y, and `fresh` becomes the last stored digit of x.
inline void baker_step(Fixed2& s, std::uint64_t fresh) noexcept {
    const std::uint64_t digit = s.x >> 52;
    s.x = ((s.x << 1) & kMask53) | fresh;
    s.y = (s.y >> 1) | (digit << 52);
}

inline void cat_step(Fixed2& s) noexcept {
    const std::uint64_t x = s.x;
    s.x = (x + s.y) & kMask53;
    s.y = (x + 2 * s.y) & kMask53;
}

/// Source of refill digits for the baker map.
class BitSource {
public:
    explicit BitSource(SampleStream* rng) : rng_(rng) {}
    std::uint64_t next() {
        if (rng_ == nullptr) return 0;
        if (left_ == 0) {
            word_ = (*rng_)();
            left_ = 64;
        }
        const std::uint64_t b = word_ & 1;
        word_ >>= 1;
        --left_;
        return b;
    }

private:
    SampleStream* rng_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

void step_inner(InnerMap map, Fixed2& s, BitSource& bits) {
    switch (map) {
        case InnerMap::identity:
            break;
        case InnerMap::baker:
            baker_step(s, bits.next());
            break;
        case InnerMap::cat:
            cat_step(s);
            break;
    }
}

std::string_view inner_name(InnerMap m) {
    switch (m) {
        case InnerMap::identity:
            return "identity";
        case InnerMap::baker:
            return "baker";
        case InnerMap::cat:
            return "cat";
    }
    return "identity";
}

void require_space(const SystemDescriptor& sys, const PhaseSpacePoint& x) {
    if (x.kind() != sys.space()) throw DomainMismatch("point does not belong to system " + sys.id());
    if (sys.space() == SpaceKind::product && x.as_product().factor_dim != sys.factor_dim()) {
        throw DomainMismatch("product point factor dimension does not match system " + sys.id());
    }
    if (sys.space() == SpaceKind::sphere &&
        x.as_sphere().dimension() != static_cast<std::size_t>(sys.sphere_dimension)) {
        throw DomainMismatch("sphere point dimension does not match system " + sys.id());
    }
}

std::vector<double> sample_normals(SampleStream& rng, int n) {
    std::normal_distribution<double> normal;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < 10; ++attempt) {
        double norm2 = 0.0;
        for (double& c : v) {
            c = normal(rng);
            norm2 += c * c;
        }
        if (norm2 > 0.0 && std::isfinite(norm2)) return v;
    }
    throw DegenerateSample("ten consecutive degenerate Gaussian draws");
}

}  // namespace

SystemDescriptor SystemDescriptor::baker() {
    return {SystemKind::baker, InnerMap::identity, BaseMeasure::lebesgue_square, 0, true,
            StationaryLimit::lebesgue_square};
}

SystemDescriptor SystemDescriptor::cat() {
    return {SystemKind::cat, InnerMap::identity, BaseMeasure::lebesgue_square, 0, true,
            StationaryLimit::lebesgue_square};
}

SystemDescriptor SystemDescriptor::product_shift(InnerMap inner) {
    return {SystemKind::product_shift, inner, BaseMeasure::lebesgue_product, 0, true,
            StationaryLimit::lebesgue_product};
}

SystemDescriptor SystemDescriptor::product_phi() {
    return {SystemKind::product_phi, InnerMap::identity, BaseMeasure::product_phi, 0, false,
            StationaryLimit::lebesgue_product};
}

SystemDescriptor SystemDescriptor::sphere_static(int n) {
    if (n < 2) throw DomainMismatch("sphere systems need dimension >= 2");
    return {SystemKind::sphere_static, InnerMap::identity, BaseMeasure::uniform_sphere, n, false,
            StationaryLimit::none};
}

SpaceKind SystemDescriptor::space() const noexcept {
    switch (kind) {
        case SystemKind::baker:
        case SystemKind::cat:
            return SpaceKind::planar;
        case SystemKind::product_shift:
        case SystemKind::product_phi:
            return SpaceKind::product;
        case SystemKind::sphere_static:
            return SpaceKind::sphere;
    }
    return SpaceKind::planar;
}

int SystemDescriptor::factor_dim() const noexcept {
    return kind == SystemKind::product_shift && inner_map != InnerMap::identity ? 2 : 1;
}

std::string SystemDescriptor::id() const {
    switch (kind) {
        case SystemKind::baker:
            return "baker";
        case SystemKind::cat:
            return "cat";
        case SystemKind::product_shift:
            return "product-shift:" + std::string(inner_name(inner_map));
        case SystemKind::product_phi:
            return "product-phi";
        case SystemKind::sphere_static:
            return "sphere:" + std::to_string(sphere_dimension);
    }
    return "baker";
}

SystemDescriptor make_system(std::string_view id) {
    if (id == "baker") return SystemDescriptor::baker();
    if (id == "cat") return SystemDescriptor::cat();
    if (id == "product-phi") return SystemDescriptor::product_phi();
    if (id == "product-shift:identity") return SystemDescriptor::product_shift(InnerMap::identity);
    if (id == "product-shift:baker") return SystemDescriptor::product_shift(InnerMap::baker);
    if (id == "product-shift:cat") return SystemDescriptor::product_shift(InnerMap::cat);
    if (id.substr(0, 7) == "sphere:") {
        const auto digits = id.substr(7);
        int n = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && n >= 2) return SystemDescriptor::sphere_static(n);
    }
    throw ParseError("unknown system id '" + std::string(id) +
                     "' (expected baker, cat, product-phi, product-shift:<identity|baker|cat>, sphere:<n>)");
}

PhaseSpacePoint iterate(const SystemDescriptor& sys, const PhaseSpacePoint& x, int k) {
    if (k < 0) throw DomainMismatch("iteration count must be nonnegative");
    require_space(sys, x);
    if (k == 0) return x;
    switch (sys.kind) {
        case SystemKind::baker:
        case SystemKind::cat: {
            const auto& p = x.as_planar();
            Fixed2 s{to_fixed(p.x), to_fixed(p.y)};
            for (int i = 0; i < k; ++i) {
                if (sys.kind == SystemKind::baker) {
                    baker_step(s, 0);
                } else {
                    cat_step(s);
                }
            }
            return PhaseSpacePoint::planar(from_fixed(s.x), from_fixed(s.y));
        }
        case SystemKind::product_shift:
        case SystemKind::product_phi: {
            const auto& p = x.as_product();
            const std::size_t depth = p.depth();
            if (depth <= static_cast<std::size_t>(k)) {
                throw TruncationUnderflow("product point of depth " + std::to_string(depth) + " cannot be shifted " +
                                          std::to_string(k) + " times");
            }
            const auto fd = static_cast<std::size_t>(p.factor_dim);
            std::vector<double> out(p.coords.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(k) * fd),
                                    p.coords.end());
            if (sys.inner_map != InnerMap::identity) {
                BitSource none(nullptr);
                for (std::size_t f = 0; f < out.size(); f += 2) {
                    Fixed2 s{to_fixed(out[f]), to_fixed(out[f + 1])};
                    for (int i = 0; i < k; ++i) step_inner(sys.inner_map, s, none);
                    out[f] = from_fixed(s.x);
                    out[f + 1] = from_fixed(s.y);
                }
            }
            return PhaseSpacePoint::product(p.factor_dim, std::move(out));
        }
        case SystemKind::sphere_static:
            return x;
    }
    return x;
}

PhaseSpacePoint sample(const SystemDescriptor& sys, SampleStream& rng, int depth) {
    switch (sys.space()) {
        case SpaceKind::planar:
            return PhaseSpacePoint::planar(uniform01(rng), uniform01(rng));
        case SpaceKind::product: {
            if (depth < 1) throw DomainMismatch("product samples need depth >= 1");
            const int fd = sys.factor_dim();
            std::vector<double> coords(static_cast<std::size_t>(depth * fd));
            for (int n = 1; n <= depth; ++n) {
                for (int c = 0; c < fd; ++c) {
                    const double u = uniform01(rng);
                    coords[static_cast<std::size_t>((n - 1) * fd + c)] =
                        sys.base_measure == BaseMeasure::product_phi ? phi_density::inverse_cdf(n, u) : u;
                }
            }
            return PhaseSpacePoint::product(fd, std::move(coords));
        }
        case SpaceKind::sphere:
            return PhaseSpacePoint::sphere(sample_normals(rng, sys.sphere_dimension));
    }
    throw DomainMismatch("unknown space");
}

PhaseSpacePoint sample(const SystemDescriptor& sys, std::uint64_t seed, int depth) {
    SampleStream rng(seed);
    return sample(sys, rng, depth);
}

std::vector<PhaseSpacePoint> sample_trajectory(const SystemDescriptor& sys, SampleStream& rng, int steps, int arity) {
    if (steps < 0) throw DomainMismatch("trajectory length must be nonnegative");
    std::vector<PhaseSpacePoint> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    switch (sys.kind) {
        case SystemKind::baker:
        case SystemKind::cat: {
            Fixed2 s{rng() >> 11, rng() >> 11};
            BitSource bits(&rng);
            for (int t = 0; t <= steps; ++t) {
                out.push_back(PhaseSpacePoint::planar(from_fixed(s.x), from_fixed(s.y)));
                if (t == steps) break;
                if (sys.kind == SystemKind::baker) {
                    baker_step(s, bits.next());
                } else {
                    cat_step(s);
                }
            }
            return out;
        }
        case SystemKind::product_shift:
        case SystemKind::product_phi: {
            if (arity < 1) throw DomainMismatch("product trajectories need arity >= 1");
            const int fd = sys.factor_dim();
            const int factors = arity + steps;
            std::vector<std::vector<double>> coords(static_cast<std::size_t>(steps) + 1,
                                                    std::vector<double>(static_cast<std::size_t>(arity * fd)));
            BitSource bits(&rng);
            // (S^t w)_j = T^t(w_{j+t}): follow each base factor m through the
            // times t at which it is visible, i.e. j = m - t in [1, arity].
            for (int m = 1; m <= factors; ++m) {
                Fixed2 s{0, 0};
                double scalar = 0.0;
                if (fd == 1) {
                    const double u = uniform01(rng);
                    scalar = sys.base_measure == BaseMeasure::product_phi ? phi_density::inverse_cdf(m, u) : u;
                } else {
                    s.x = rng() >> 11;
                    s.y = rng() >> 11;
                }
                const int t_last = std::min(steps, m - 1);
                for (int t = 0; t <= t_last; ++t) {
                    const int j = m - t;
                    if (j <= arity) {
                        auto& row = coords[static_cast<std::size_t>(t)];
                        if (fd == 1) {
                            row[static_cast<std::size_t>(j - 1)] = scalar;
                        } else {
                            row[static_cast<std::size_t>(2 * (j - 1))] = from_fixed(s.x);
                            row[static_cast<std::size_t>(2 * (j - 1) + 1)] = from_fixed(s.y);
                        }
                    }
                    if (fd == 2 && t < t_last) step_inner(sys.inner_map, s, bits);
                }
            }
            for (auto& row : coords) out.push_back(PhaseSpacePoint::product(fd, std::move(row)));
            return out;
        }
        case SystemKind::sphere_static: {
            const auto x = sample(sys, rng, 0);
            out.assign(static_cast<std::size_t>(steps) + 1, x);
            return out;
        }
    }
    return out;
}

double base_measure_of_box(const SystemDescriptor& sys, const EventSet& set) {
    if (sys.space() == SpaceKind::sphere) {
        throw UnsupportedSet("sphere measures have no closed-form box measure; use sampling");
    }
    if (set.is_empty()) return 0.0;
    if (sys.space() == SpaceKind::planar) {
        if (!set.is_box() || set.as_box().dimension() != 2) throw DomainMismatch("planar systems measure planar boxes");
        return set.as_box().volume();
    }
    if (!set.is_cylinder()) throw DomainMismatch("product systems measure cylinder sets");
    const auto& cyl = set.as_cylinder();
    if (cyl.factor_dim != sys.factor_dim()) throw DomainMismatch("cylinder factor dimension does not match the system");
    double m = 1.0;
    for (const auto& [index, box] : cyl.constraints) {
        m *= sys.base_measure == BaseMeasure::product_phi ? phi_density::mass(index, box.sides[0]) : box.volume();
    }
    return m;
}

DyadicRect baker_preimage(const DyadicRect& set, int k) {
    if (k < 0) throw DomainMismatch("preimage order must be nonnegative");
    if (k == 0) return set;
    const int p0 = std::max(set.resolution(), 1);
    if (p0 + k > DyadicRect::kMaxResolution) {
        throw ResolutionOverflow("baker preimage needs resolution " + std::to_string(p0 + k) + " > " +
                                 std::to_string(DyadicRect::kMaxResolution));
    }
    DyadicRect current = set.refine(p0);
    for (int step = 0; step < k; ++step) {
        const int p = current.resolution();
        const std::int64_t half = std::int64_t{1} << (p - 1);
        const std::int64_t side = std::int64_t{1} << p;
        std::vector<DyadicRect::Slab> lower, upper;
        for (const auto& slab : current.slabs()) {
            DyadicRect::Slab lo{slab.x0, slab.x1, {}};
            DyadicRect::Slab hi{slab.x0 + side, slab.x1 + side, {}};
            for (auto [y0, y1] : slab.ys) {
                // S(x, y) has y-coordinate below 1/2 exactly on the left branch.
                if (y0 < half) lo.ys.emplace_back(4 * y0, 4 * std::min(y1, half));
                if (y1 > half) hi.ys.emplace_back(4 * std::max(y0, half) - 2 * side, 4 * y1 - 2 * side);
            }
            if (!lo.ys.empty()) lower.push_back(std::move(lo));
            if (!hi.ys.empty()) upper.push_back(std::move(hi));
        }
        lower.insert(lower.end(), std::make_move_iterator(upper.begin()), std::make_move_iterator(upper.end()));
        current = DyadicRect::from_slabs(p + 1, std::move(lower));
    }
    return current;
}

namespace phi_density {

namespace {
// phi_k = 1 on [0, a_k], 2 on (a_k, b_k], 0 beyond, a_k = 1 - 2^-(k-1), b_k = 1 - 2^-k.
double left_end(int k) noexcept { return 1.0 - std::ldexp(1.0, -(k - 1)); }
double right_end(int k) noexcept { return 1.0 - std::ldexp(1.0, -k); }
}  // namespace

double cdf(int k, double x) noexcept {
    const double a = left_end(k);
    const double b = right_end(k);
    if (x <= 0.0) return 0.0;
    if (x <= a) return x;
    if (x <= b) return a + 2.0 * (x - a);
    return 1.0;
}

double inverse_cdf(int k, double u) noexcept {
    const double a = left_end(k);
    return u <= a ? u : a + 0.5 * (u - a);
}

double mass(int k, const Interval& iv) noexcept { return cdf(k, iv.hi) - cdf(k, iv.lo); }

double density(int k, double x) noexcept {
    const double a = left_end(k);
    const double b = right_end(k);
    if (x < 0.0 || x > b) return 0.0;
    if (x <= a) return 1.0;
    return 2.0;
}

}  // namespace phi_density

}  // namespace orbitchaos
