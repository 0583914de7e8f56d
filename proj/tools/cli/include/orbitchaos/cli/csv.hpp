#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/kacsphere/kacsphere.hpp"
#include "orbitchaos/mixing/mixing.hpp"

namespace orbitchaos::cli {

/// %.17g, enough digits to read back the exact double.
std::string number(double v);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

using CsvRow = std::vector<std::string>;
/// Parses RFC 4180 style CSV (quoted fields, doubled quotes).
std::vector<CsvRow> read_csv(std::istream& in);

inline constexpr std::string_view kMixingHeader = "system,set_a,set_b,k,i_star,value,std_error,n_samples,method";
inline constexpr std::string_view kChaosHeader = "system,g_id,n,J_n,std_error,nu_integral,nu_provenance,n_samples";
inline constexpr std::string_view kHistogramHeader = "bin_left,bin_right,mass,reference_mass,gaussian_mass";
inline constexpr std::string_view kStationaryHeader =
    "system,set,k,value,std_error,n_samples,exact,nu,gap,exact_gap,tail_bound";
inline constexpr std::string_view kMarginalHeader = "system,phi,n,k,lhs,std_error,rhs,gap,n_samples";
inline constexpr std::string_view kMomentHeader = "n,a,b,value,std_error,n_samples,seed,batch_count,reference";
inline constexpr std::string_view kPlotHeader = "experiment,x,y,y_err";

std::string mixing_csv(const CorrelationReport& report);
std::string chaos_csv(const std::vector<ChaosSweepReport>& reports);
std::string histogram_csv(const kac::MarginalReport& report);
std::string stationary_csv(const StationaryScan& scan, bool with_tail_bound);

/// Long-format projection of report CSVs (mixing, chaos, stationary,
/// histogram) to experiment,x,y,y_err. Throws ParseError on an unknown
/// header. Inputs that are empty or header-only contribute no rows.
std::string plotdata_csv(const std::vector<std::string>& csv_texts);

}  // namespace orbitchaos::cli
