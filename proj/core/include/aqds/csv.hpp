#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace aqds::csv {

/// Shortest decimal form of v that round-trips exactly, with
/// locale-independent formatting: '.' as the decimal separator and, when
/// scientific notation is chosen, an explicitly signed exponent of at least
/// two digits ("1.5e-07", "2.3e+115"). Non-finite values render as "inf",
/// "-inf", "nan".
std::string format_double(double v);

std::string format_int(std::int64_t v);

/// "1" / "0"; booleans are numeric so downstream parsers need no string
/// comparisons.
std::string format_bool(bool v);

/// Emits one versioned CSV table: a "# <schema>-v<version>" comment line,
/// a header row naming every column, then fixed-arity data rows. Cells must
/// not contain commas, quotes, newlines, or carriage returns (all values
/// here are numbers or short enum labels); violations throw
/// std::invalid_argument, as does a row of the wrong arity.
class Writer {
public:
    Writer(std::ostream& out, std::string_view schema, int version,
           const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);

    std::size_t rows_written() const { return rows_; }

private:
    std::ostream& out_;
    std::size_t arity_;
    std::size_t rows_ = 0;
};

}  // namespace aqds::csv
