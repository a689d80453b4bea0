#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qkdfinite/optimize.hpp"

namespace qkdfinite::cli {

// Shortest text that parses back to exactly `value` is not guaranteed by
// %g, so everything numeric goes out with 17 significant digits.
std::string format_real(double value);

// Fixed column order of the per-N result table.
const std::vector<std::string_view>& result_columns();

std::string result_header();
std::string result_row(const Scenario& scenario, const OptResult& result,
                       std::string_view status);
// Row for an N whose optimization raised an error.
std::string failed_row(const Scenario& scenario, std::uint64_t n_signals,
                       std::string_view status);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace qkdfinite::cli
