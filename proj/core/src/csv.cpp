#include "aqds/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace aqds::csv {

namespace {

// std::to_chars already guarantees '.' as the decimal separator and a
// shortest round-trip representation; implementations differ only in how
// they pad the exponent, so that part is normalized by hand.
std::string normalize_exponent(std::string text) {
    const std::size_t e = text.find('e');
    if (e == std::string::npos) return text;

    std::string head = text.substr(0, e + 1);
    std::string tail = text.substr(e + 1);
    char sign = '+';
    if (!tail.empty() && (tail.front() == '+' || tail.front() == '-')) {
        sign = tail.front();
        tail.erase(tail.begin());
    }
    while (tail.size() > 1 && tail.front() == '0') tail.erase(tail.begin());
    while (tail.size() < 2) tail.insert(tail.begin(), '0');
    head.push_back(sign);
    return head + tail;
}

void check_cell(const std::string& cell) {
    for (const char c : cell) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            throw std::invalid_argument(
                "csv: cell contains a separator or line break: '" + cell + "'");
        }
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::invalid_argument("csv: to_chars failed");
    return normalize_exponent(std::string(buf, res.ptr));
}

std::string format_int(std::int64_t v) {
    char buf[32];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_bool(bool v) { return v ? "1" : "0"; }

Writer::Writer(std::ostream& out, std::string_view schema, int version,
               const std::vector<std::string>& columns)
    : out_(out), arity_(columns.size()) {
    if (columns.empty()) throw std::invalid_argument("csv: no columns");
    out_ << "# " << schema << "-v" << version << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        check_cell(columns[i]);
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != arity_) {
        throw std::invalid_argument("csv: row arity " +
                                    std::to_string(cells.size()) +
                                    " does not match header arity " +
                                    std::to_string(arity_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        check_cell(cells[i]);
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }
    ++rows_;
}

}  // namespace aqds::csv
