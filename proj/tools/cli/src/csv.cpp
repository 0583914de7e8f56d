#include "orbitchaos/cli/csv.hpp"

#include <cstdio>
#include <sstream>

#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"

namespace orbitchaos::cli {

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<CsvRow> read_csv(std::istream& in) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV field");
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string mixing_csv(const CorrelationReport& report) {
    std::ostringstream out;
    out << kMixingHeader << '\n';
    for (const auto& r : report.rows) {
        out << csv_field(report.system) << ',' << csv_field(to_string(report.set_a)) << ','
            << csv_field(to_string(report.set_b)) << ',' << r.k << ',' << r.i_star << ',' << number(r.estimate.value)
            << ',' << number(r.estimate.std_error) << ',' << r.estimate.n_samples << ',' << method_name(r.method)
            << '\n';
    }
    return out.str();
}

std::string chaos_csv(const std::vector<ChaosSweepReport>& reports) {
    std::ostringstream out;
    out << kChaosHeader << '\n';
    for (const auto& rep : reports) {
        for (const auto& r : rep.rows) {
            out << csv_field(rep.system) << ',' << csv_field(rep.g_id) << ',' << r.n << ',' << number(r.j_n.value)
                << ',' << number(r.j_n.std_error) << ',' << number(rep.nu.value) << ','
                << provenance_name(rep.nu.provenance) << ',' << r.j_n.n_samples << '\n';
        }
    }
    return out.str();
}

std::string histogram_csv(const kac::MarginalReport& report) {
    std::ostringstream out;
    out << kHistogramHeader << '\n';
    for (const auto& b : report.bins) {
        out << number(b.left) << ',' << number(b.right) << ',' << number(b.mass) << ',' << number(b.reference_mass)
            << ',' << number(b.gaussian_mass) << '\n';
    }
    return out.str();
}

std::string stationary_csv(const StationaryScan& scan, bool with_tail_bound) {
    const auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
    std::ostringstream out;
    out << kStationaryHeader << '\n';
    for (const auto& r : scan.rows) {
        out << csv_field(scan.system) << ',' << csv_field(to_string(scan.set)) << ',' << r.k << ','
            << number(r.estimate.value) << ',' << number(r.estimate.std_error) << ',' << r.estimate.n_samples << ','
            << opt(r.exact) << ',' << opt(scan.nu) << ',' << opt(r.gap) << ',' << opt(r.exact_gap) << ','
            << (with_tail_bound && r.k >= 1 ? number(tail_bound_check(r.k).bound) : std::string()) << '\n';
    }
    return out.str();
}

namespace {

struct Projection {
    std::string_view header;
    std::string experiment;
    int x, y, y_err;  ///< column indices; y_err < 0 means 0
};

const Projection kProjections[] = {
    {kMixingHeader, "mixing", 3, 5, 6},
    {kChaosHeader, "chaos", 2, 3, 4},
    {kStationaryHeader, "stationary", 2, 3, 4},
    {kHistogramHeader, "histogram", -1, 2, -1},
};

std::string join(const CsvRow& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) s += ',';
        s += row[i];
    }
    return s;
}

}  // namespace

std::string plotdata_csv(const std::vector<std::string>& csv_texts) {
    std::ostringstream out;
    out << kPlotHeader << '\n';
    for (const auto& text : csv_texts) {
        std::istringstream in(text);
        const auto rows = read_csv(in);
        if (rows.empty()) continue;
        const auto header = join(rows[0]);
        const Projection* p = nullptr;
        for (const auto& candidate : kProjections) {
            if (header == candidate.header) p = &candidate;
        }
        if (p == nullptr) throw ParseError("plotdata: unrecognized report header '" + header + "'");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != rows[0].size()) throw ParseError("plotdata: row " + std::to_string(i) + " has wrong width");
            std::string x;
            if (p->x >= 0) {
                x = row[static_cast<std::size_t>(p->x)];
            } else {
                // histogram: bin centre
                x = number(0.5 * (parse_double(row[0]) + parse_double(row[1])));
            }
            out << p->experiment << ',' << x << ',' << row[static_cast<std::size_t>(p->y)] << ','
                << (p->y_err >= 0 ? row[static_cast<std::size_t>(p->y_err)] : std::string("0")) << '\n';
        }
    }
    return out.str();
}

}  // namespace orbitchaos::cli
