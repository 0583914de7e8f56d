#include "orbitchaos/core/grammar.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "orbitchaos/core/error.hpp"

namespace orbitchaos {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool consume(std::string_view& s, std::string_view prefix) {
    if (s.substr(0, prefix.size()) != prefix) return false;
    s.remove_prefix(prefix.size());
    return true;
}

int parse_int(std::string_view text) {
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty()) throw ParseError("expected an integer, got '" + std::string(text) + "'");
    return v;
}

Interval parse_interval(std::string_view text) {
    if (text.size() < 5 || text.front() != '[' || text.back() != ')') {
        throw ParseError("expected a half-open interval [a,b), got '" + std::string(text) + "'");
    }
    const auto parts = split(text.substr(1, text.size() - 2), ',');
    if (parts.size() != 2) throw ParseError("interval needs two endpoints: '" + std::string(text) + "'");
    try {
        return Interval(parse_double(parts[0]), parse_double(parts[1]));
    } catch (const DomainMismatch& e) {
        throw ParseError(e.what());
    }
}

std::string interval_text(const Interval& iv) {
    return "[" + format_double(iv.lo) + "," + format_double(iv.hi) + ")";
}

// Polynomial scanner ----------------------------------------------------------

class PolyScanner {
public:
    PolyScanner(std::string_view text, FunctionDomain domain) : s_(text), domain_(domain) {}

    std::vector<Monomial> terms() {
        std::vector<Monomial> out;
        if (s_.empty()) throw ParseError("empty polynomial");
        bool first = true;
        while (pos_ < s_.size()) {
            double sign = 1.0;
            if (s_[pos_] == '+' || s_[pos_] == '-') {
                sign = s_[pos_] == '-' ? -1.0 : 1.0;
                ++pos_;
            } else if (!first) {
                throw ParseError("expected '+' or '-' in polynomial at '" + std::string(s_.substr(pos_)) + "'");
            }
            first = false;
            Monomial m = term();
            m.coefficient *= sign;
            out.push_back(std::move(m));
        }
        return out;
    }

private:
    Monomial term() {
        Monomial m{1.0, {}};
        factor(m);
        while (pos_ < s_.size() && s_[pos_] == '*') {
            ++pos_;
            factor(m);
        }
        return m;
    }

    void factor(Monomial& m) {
        if (pos_ >= s_.size()) throw ParseError("polynomial ends unexpectedly");
        const char c = s_[pos_];
        if (c == 'x' || c == 'y') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const auto digits = s_.substr(start, pos_ - start);
            int flat = 0;
            const int component = c == 'x' ? 0 : 1;
            if (domain_.kind == SpaceKind::planar) {
                if (!digits.empty()) throw ParseError("planar polynomials use bare x and y");
                flat = component;
            } else {
                if (digits.empty()) throw ParseError("product polynomials index coordinates, e.g. x1");
                const int n = parse_int(digits);
                if (n < 1) throw ParseError("factor indices start at 1");
                if (component >= domain_.factor_dim) throw ParseError("y<n> needs two-dimensional factors");
                flat = (n - 1) * domain_.factor_dim + component;
            }
            int power = 1;
            if (pos_ < s_.size() && s_[pos_] == '^') {
                ++pos_;
                const std::size_t p0 = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                power = parse_int(s_.substr(p0, pos_ - p0));
            }
            m.powers.emplace_back(flat, power);
            return;
        }
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char d = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(d)) || d == '.') {
                ++pos_;
            } else if ((d == 'e' || d == 'E') && pos_ > start) {
                ++pos_;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == start) throw ParseError("unexpected character in polynomial: '" + std::string(1, c) + "'");
        m.coefficient *= parse_double(s_.substr(start, pos_ - start));
    }

    std::string_view s_;
    FunctionDomain domain_;
    std::size_t pos_ = 0;
};

std::string variable_name(int flat, const FunctionDomain& d) {
    if (d.kind == SpaceKind::planar) return flat == 0 ? "x" : "y";
    const int n = flat / d.factor_dim + 1;
    return std::string(flat % d.factor_dim == 0 ? "x" : "y") + std::to_string(n);
}

std::string polynomial_text(const PolynomialFn& p) {
    if (p.terms.size() == 1 && p.terms[0].powers.empty()) return "const:" + format_double(p.terms[0].coefficient);
    std::string out = "poly:";
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const auto& t = p.terms[i];
        double c = t.coefficient;
        if (std::signbit(c)) {
            out += '-';
            c = -c;
        } else if (i > 0) {
            out += '+';
        }
        bool need_star = false;
        if (c != 1.0 || t.powers.empty()) {
            out += format_double(c);
            need_star = true;
        }
        for (const auto& [flat, pw] : t.powers) {
            if (need_star) out += '*';
            out += variable_name(flat, p.domain);
            if (pw != 1) out += "^" + std::to_string(pw);
            need_star = true;
        }
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty()) throw ParseError("expected a number, got '" + std::string(text) + "'");
    return v;
}

EventSet parse_event_set(std::string_view text) {
    std::string_view s = text;
    if (s == "empty") return EventSet::empty();
    if (consume(s, "box:")) {
        std::vector<Interval> sides;
        for (const auto side : split(s, ';')) {
            const auto ends = split(side, ',');
            if (ends.size() != 2) throw ParseError("box side needs 'a,b': '" + std::string(side) + "'");
            try {
                sides.emplace_back(parse_double(ends[0]), parse_double(ends[1]));
            } catch (const DomainMismatch& e) {
                throw ParseError(e.what());
            }
        }
        return EventSet::box(std::move(sides));
    }
    if (consume(s, "cyl:")) {
        std::map<int, Box> constraints;
        int factor_dim = 0;
        for (const auto entry : split(s, ';')) {
            const auto colon = entry.find(':');
            if (colon == std::string_view::npos) throw ParseError("cylinder entry needs 'index:[a,b)'");
            const int index = parse_int(entry.substr(0, colon));
            if (index < 1) throw ParseError("cylinder indices start at 1");
            Box box;
            for (const auto part : split(entry.substr(colon + 1), 'x')) box.sides.push_back(parse_interval(part));
            const int dim = static_cast<int>(box.sides.size());
            if (dim > 2) throw ParseError("cylinder factors have dimension 1 or 2");
            if (factor_dim != 0 && dim != factor_dim) throw ParseError("mixed factor dimensions in cylinder");
            factor_dim = dim;
            if (!constraints.emplace(index, std::move(box)).second) throw ParseError("repeated cylinder index");
        }
        return EventSet::cylinder(factor_dim, std::move(constraints));
    }
    throw ParseError("unknown set '" + std::string(text) + "' (expected empty, box:..., cyl:...)");
}

BoundedTestFunction parse_test_function(std::string_view text, FunctionDomain domain) {
    std::string_view s = text;
    try {
        if (consume(s, "ind:")) return BoundedTestFunction::indicator(parse_event_set(s));
        if (consume(s, "const:")) return BoundedTestFunction::constant(domain, parse_double(s));
        if (consume(s, "poly:")) return BoundedTestFunction::polynomial(domain, PolyScanner(s, domain).terms());
        if (consume(s, "trig:")) {
            TrigKind kind;
            if (consume(s, "cos:")) {
                kind = TrigKind::cos;
            } else if (consume(s, "sin:")) {
                kind = TrigKind::sin;
            } else {
                throw ParseError("trig functions are trig:cos:... or trig:sin:...");
            }
            std::vector<double> freq;
            for (const auto f : split(s, ',')) freq.push_back(parse_double(f));
            return BoundedTestFunction::trig(domain, kind, std::move(freq));
        }
        if (consume(s, "cylfn:")) {
            const auto colon = s.find(':');
            if (colon == std::string_view::npos) throw ParseError("cylfn needs 'arity:function'");
            const int arity = parse_int(s.substr(0, colon));
            return BoundedTestFunction::cylinder(arity, parse_test_function(s.substr(colon + 1), domain));
        }
    } catch (const DomainMismatch& e) {
        throw ParseError(std::string("invalid test function '") + std::string(text) + "': " + e.what());
    }
    throw ParseError("unknown test function '" + std::string(text) + "'");
}

std::string to_string(const EventSet& set) {
    if (set.is_empty()) return "empty";
    if (set.is_box()) {
        std::string out = "box:";
        const auto& sides = set.as_box().sides;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            if (i > 0) out += ';';
            out += format_double(sides[i].lo) + "," + format_double(sides[i].hi);
        }
        return out;
    }
    std::string out = "cyl:";
    bool first = true;
    for (const auto& [index, box] : set.as_cylinder().constraints) {
        if (!first) out += ';';
        first = false;
        out += std::to_string(index) + ":";
        for (std::size_t i = 0; i < box.sides.size(); ++i) {
            if (i > 0) out += 'x';
            out += interval_text(box.sides[i]);
        }
    }
    return out;
}

std::string to_string(const BoundedTestFunction& g) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IndicatorFn>) {
                return "ind:" + to_string(v.set);
            } else if constexpr (std::is_same_v<T, PolynomialFn>) {
                return polynomial_text(v);
            } else if constexpr (std::is_same_v<T, TrigFn>) {
                std::string out = v.kind == TrigKind::cos ? "trig:cos:" : "trig:sin:";
                for (std::size_t i = 0; i < v.frequency.size(); ++i) {
                    if (i > 0) out += ',';
                    out += format_double(v.frequency[i]);
                }
                return out;
            } else {
                return "cylfn:" + std::to_string(v.arity) + ":" + to_string(*v.inner);
            }
        },
        g.variant());
}

}  // namespace orbitchaos
