#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "orbitchaos/core/event_set.hpp"

namespace orbitchaos {

/// Exact finite union of dyadic cells of the unit square at resolution p:
/// cell (i, j) is [i 2^-p, (i+1) 2^-p) x [j 2^-p, (j+1) 2^-p), 0 <= i, j < 2^p.
///
/// Stored as canonical vertical slabs: disjoint x-ranges in increasing order,
/// each carrying a sorted list of disjoint, non-adjacent y-ranges (all in
/// units of 2^-p). Adjacent slabs with equal y-lists are merged, so equal
/// sets at equal resolution have equal representations. This keeps deep
/// baker preimages (many cells, few rectangles) compact.
class DyadicRect {
public:
    static constexpr int kMaxResolution = 30;

    using Range = std::pair<std::int64_t, std::int64_t>;  ///< half-open [first, second)

    struct Slab {
        std::int64_t x0 = 0;
        std::int64_t x1 = 0;
        std::vector<Range> ys;
        bool operator==(const Slab&) const = default;
    };

    DyadicRect() = default;
    static DyadicRect empty(int resolution);
    static DyadicRect full(int resolution);
    static DyadicRect from_cells(int resolution, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells);
    /// Union of rectangles [x0, x1) x [y0, y1) given in cell units.
    static DyadicRect from_rects(int resolution, const std::vector<std::pair<Range, Range>>& rects);
    /// Exact conversion of a planar box whose endpoints are dyadic rationals
    /// with denominator at most 2^30, at the coarsest resolution that fits.
    static DyadicRect from_box(const Box& box);

    int resolution() const noexcept { return resolution_; }
    const std::vector<Slab>& slabs() const noexcept { return slabs_; }
    bool is_empty() const noexcept { return slabs_.empty(); }

    /// Number of resolution-p cells covered; Lebesgue measure is cell_count() * 4^-p.
    std::uint64_t cell_count() const noexcept;
    double measure() const noexcept;

    /// Same set at a finer resolution.
    DyadicRect refine(int resolution) const;
    DyadicRect intersect(const DyadicRect& other) const;
    bool contains(double x, double y) const noexcept;

    /// Enumerates covered cells; throws ResolutionOverflow above `limit` cells.
    std::vector<std::pair<std::int64_t, std::int64_t>> cells(std::uint64_t limit = 1u << 22) const;

    bool operator==(const DyadicRect&) const = default;

    /// Builds from slabs in any order, then canonicalizes. Slabs must not overlap.
    static DyadicRect from_slabs(int resolution, std::vector<Slab> slabs);

private:
    void canonicalize();

    int resolution_ = 0;
    std::vector<Slab> slabs_;
};

/// Smallest p with v * 2^p an integer, or -1 if p would exceed kMaxResolution.
int dyadic_order(double v) noexcept;

}  // namespace orbitchaos
