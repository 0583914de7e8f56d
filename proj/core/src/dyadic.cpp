#include "orbitchaos/core/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orbitchaos/core/error.hpp"

namespace orbitchaos {

namespace {

void check_resolution(int p) {
    if (p < 0 || p > DyadicRect::kMaxResolution) {
        throw ResolutionOverflow("dyadic resolution " + std::to_string(p) + " outside [0, " +
                                 std::to_string(DyadicRect::kMaxResolution) + "]");
    }
}

/// Sorts and unions ranges, merging overlapping and adjacent ones.
std::vector<DyadicRect::Range> normalize_ranges(std::vector<DyadicRect::Range> rs) {
    std::erase_if(rs, [](const auto& r) { return r.first >= r.second; });
    std::sort(rs.begin(), rs.end());
    std::vector<DyadicRect::Range> out;
    for (const auto& r : rs) {
        if (!out.empty() && r.first <= out.back().second) {
            out.back().second = std::max(out.back().second, r.second);
        } else {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<DyadicRect::Range> intersect_ranges(const std::vector<DyadicRect::Range>& a,
                                                const std::vector<DyadicRect::Range>& b) {
    std::vector<DyadicRect::Range> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const auto lo = std::max(a[i].first, b[j].first);
        const auto hi = std::min(a[i].second, b[j].second);
        if (lo < hi) out.emplace_back(lo, hi);
        if (a[i].second < b[j].second) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

}  // namespace

int dyadic_order(double v) noexcept {
    for (int p = 0; p <= DyadicRect::kMaxResolution; ++p) {
        const double scaled = std::ldexp(v, p);
        if (scaled == std::floor(scaled)) return p;
    }
    return -1;
}

DyadicRect DyadicRect::empty(int resolution) {
    check_resolution(resolution);
    DyadicRect r;
    r.resolution_ = resolution;
    return r;
}

DyadicRect DyadicRect::full(int resolution) {
    check_resolution(resolution);
    const std::int64_t side = std::int64_t{1} << resolution;
    return from_slabs(resolution, {Slab{0, side, {{0, side}}}});
}

DyadicRect DyadicRect::from_cells(int resolution, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells) {
    std::vector<std::pair<Range, Range>> rects;
    rects.reserve(cells.size());
    for (const auto& [i, j] : cells) rects.push_back({{i, i + 1}, {j, j + 1}});
    return from_rects(resolution, rects);
}

DyadicRect DyadicRect::from_rects(int resolution, const std::vector<std::pair<Range, Range>>& rects) {
    check_resolution(resolution);
    const std::int64_t side = std::int64_t{1} << resolution;
    std::vector<std::int64_t> breaks;
    for (const auto& [xr, yr] : rects) {
        if (xr.first < 0 || xr.second > side || yr.first < 0 || yr.second > side || xr.first >= xr.second ||
            yr.first >= yr.second) {
            throw DomainMismatch("dyadic rectangle outside the unit square or empty");
        }
        breaks.push_back(xr.first);
        breaks.push_back(xr.second);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<Slab> slabs;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        Slab slab{breaks[s], breaks[s + 1], {}};
        for (const auto& [xr, yr] : rects) {
            if (xr.first <= slab.x0 && slab.x1 <= xr.second) slab.ys.push_back(yr);
        }
        if (!slab.ys.empty()) slabs.push_back(std::move(slab));
    }
    return from_slabs(resolution, std::move(slabs));
}

DyadicRect DyadicRect::from_box(const Box& box) {
    if (box.dimension() != 2) throw DomainMismatch("dyadic rectangles live on the unit square");
    int p = 0;
    for (const auto& side : box.sides) {
        for (double v : {side.lo, side.hi}) {
            const int order = dyadic_order(v);
            if (order < 0) throw ResolutionOverflow("box endpoint is not a dyadic rational of order <= 30");
            p = std::max(p, order);
        }
    }
    const auto to_units = [p](double v) { return static_cast<std::int64_t>(std::ldexp(v, p)); };
    const Range xr{to_units(box.sides[0].lo), to_units(box.sides[0].hi)};
    const Range yr{to_units(box.sides[1].lo), to_units(box.sides[1].hi)};
    return from_rects(p, {{xr, yr}});
}

DyadicRect DyadicRect::from_slabs(int resolution, std::vector<Slab> slabs) {
    check_resolution(resolution);
    DyadicRect r;
    r.resolution_ = resolution;
    r.slabs_ = std::move(slabs);
    r.canonicalize();
    return r;
}

void DyadicRect::canonicalize() {
    for (auto& s : slabs_) s.ys = normalize_ranges(std::move(s.ys));
    std::erase_if(slabs_, [](const Slab& s) { return s.ys.empty() || s.x0 >= s.x1; });
    std::sort(slabs_.begin(), slabs_.end(), [](const Slab& a, const Slab& b) { return a.x0 < b.x0; });
    std::vector<Slab> merged;
    merged.reserve(slabs_.size());
    for (auto& s : slabs_) {
        if (!merged.empty() && merged.back().x1 > s.x0) throw DomainMismatch("overlapping dyadic slabs");
        if (!merged.empty() && merged.back().x1 == s.x0 && merged.back().ys == s.ys) {
            merged.back().x1 = s.x1;
        } else {
            merged.push_back(std::move(s));
        }
    }
    slabs_ = std::move(merged);
}

std::uint64_t DyadicRect::cell_count() const noexcept {
    std::uint64_t count = 0;
    for (const auto& s : slabs_) {
        std::uint64_t height = 0;
        for (const auto& [y0, y1] : s.ys) height += static_cast<std::uint64_t>(y1 - y0);
        count += static_cast<std::uint64_t>(s.x1 - s.x0) * height;
    }
    return count;
}

double DyadicRect::measure() const noexcept {
    return std::ldexp(static_cast<double>(cell_count()), -2 * resolution_);
}

DyadicRect DyadicRect::refine(int resolution) const {
    check_resolution(resolution);
    if (resolution < resolution_) throw DomainMismatch("refine cannot coarsen a dyadic set");
    const int shift = resolution - resolution_;
    DyadicRect r;
    r.resolution_ = resolution;
    r.slabs_ = slabs_;
    for (auto& s : r.slabs_) {
        s.x0 <<= shift;
        s.x1 <<= shift;
        for (auto& [y0, y1] : s.ys) {
            y0 <<= shift;
            y1 <<= shift;
        }
    }
    return r;
}

DyadicRect DyadicRect::intersect(const DyadicRect& other) const {
    const int p = std::max(resolution_, other.resolution_);
    const DyadicRect a = refine(p);
    const DyadicRect b = other.refine(p);
    std::vector<Slab> out;
    std::size_t i = 0, j = 0;
    while (i < a.slabs_.size() && j < b.slabs_.size()) {
        const auto& sa = a.slabs_[i];
        const auto& sb = b.slabs_[j];
        const auto x0 = std::max(sa.x0, sb.x0);
        const auto x1 = std::min(sa.x1, sb.x1);
        if (x0 < x1) {
            auto ys = intersect_ranges(sa.ys, sb.ys);
            if (!ys.empty()) out.push_back(Slab{x0, x1, std::move(ys)});
        }
        if (sa.x1 < sb.x1) {
            ++i;
        } else {
            ++j;
        }
    }
    return from_slabs(p, std::move(out));
}

bool DyadicRect::contains(double x, double y) const noexcept {
    if (!(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0)) return false;
    const auto xi = static_cast<std::int64_t>(std::floor(std::ldexp(x, resolution_)));
    const auto yi = static_cast<std::int64_t>(std::floor(std::ldexp(y, resolution_)));
    auto it = std::upper_bound(slabs_.begin(), slabs_.end(), xi, [](std::int64_t v, const Slab& s) { return v < s.x0; });
    if (it == slabs_.begin()) return false;
    --it;
    if (xi >= it->x1) return false;
    return std::any_of(it->ys.begin(), it->ys.end(), [yi](const Range& r) { return r.first <= yi && yi < r.second; });
}

std::vector<std::pair<std::int64_t, std::int64_t>> DyadicRect::cells(std::uint64_t limit) const {
    if (cell_count() > limit) throw ResolutionOverflow("too many dyadic cells to enumerate");
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    out.reserve(cell_count());
    for (const auto& s : slabs_) {
        for (auto i = s.x0; i < s.x1; ++i) {
            for (const auto& [y0, y1] : s.ys) {
                for (auto j = y0; j < y1; ++j) out.emplace_back(i, j);
            }
        }
    }
    return out;
}

}  // namespace orbitchaos
