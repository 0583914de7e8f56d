#include "orbitchaos/core/event_set.hpp"

#include <string>

#include "orbitchaos/core/error.hpp"

namespace orbitchaos {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
        throw DomainMismatch("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             ") must be nonempty and inside [0, 1]");
    }
}

bool Box::contains(std::span<const double> coords) const {
    if (coords.size() != sides.size()) throw DomainMismatch("box dimension does not match the point");
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (!sides[i].contains(coords[i])) return false;
    }
    return true;
}

double Box::volume() const noexcept {
    double v = 1.0;
    for (const auto& s : sides) v *= s.length();
    return v;
}

EventSet EventSet::box(std::vector<Interval> sides) {
    if (sides.empty()) throw DomainMismatch("box needs at least one side");
    return EventSet(Box{std::move(sides)});
}

EventSet EventSet::cylinder(std::map<int, Interval> constraints) {
    std::map<int, Box> boxes;
    for (const auto& [index, iv] : constraints) boxes.emplace(index, Box{{iv}});
    return cylinder(1, std::move(boxes));
}

EventSet EventSet::cylinder(int factor_dim, std::map<int, Box> constraints) {
    if (factor_dim != 1 && factor_dim != 2) throw DomainMismatch("cylinder factors must have dimension 1 or 2");
    for (const auto& [index, box] : constraints) {
        if (index < 1) throw DomainMismatch("cylinder coordinate indices start at 1");
        if (box.dimension() != static_cast<std::size_t>(factor_dim)) {
            throw DomainMismatch("cylinder constraint dimension does not match the factor dimension");
        }
    }
    return EventSet(Cylinder{factor_dim, std::move(constraints)});
}

const Box& EventSet::as_box() const {
    if (const auto* b = std::get_if<Box>(&value_)) return *b;
    throw DomainMismatch("expected a box");
}

const Cylinder& EventSet::as_cylinder() const {
    if (const auto* c = std::get_if<Cylinder>(&value_)) return *c;
    throw DomainMismatch("expected a cylinder set");
}

int EventSet::required_depth() const noexcept {
    if (const auto* c = std::get_if<Cylinder>(&value_)) return c->max_index();
    return 0;
}

bool EventSet::contains(const PhaseSpacePoint& x) const {
    if (is_empty()) return false;
    if (const auto* b = std::get_if<Box>(&value_)) {
        if (x.kind() != SpaceKind::planar) throw DomainMismatch("boxes live on the unit square");
        const auto& p = x.as_planar();
        const double c[2] = {p.x, p.y};
        return b->contains(c);
    }
    const auto& cyl = std::get<Cylinder>(value_);
    if (x.kind() != SpaceKind::product) throw DomainMismatch("cylinders live on product spaces");
    const auto& p = x.as_product();
    if (p.factor_dim != cyl.factor_dim) throw DomainMismatch("cylinder factor dimension does not match the point");
    for (const auto& [index, box] : cyl.constraints) {
        if (!box.contains(p.factor(static_cast<std::size_t>(index)))) return false;
    }
    return true;
}

}  // namespace orbitchaos
