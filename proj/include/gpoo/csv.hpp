#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gpoo {

/// Shortest decimal string that round-trips to the same double.
/// Non-finite values render as "nan", "inf", "-inf".
[[nodiscard]] std::string format_double(double v);

/// Splits one CSV line on commas. No quoting support; none of our files need it.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

[[nodiscard]] double parse_double(std::string_view text);

}  // namespace gpoo
