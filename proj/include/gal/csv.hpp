#pragma once

// Minimal CSV reading shared by the tabular parsers.

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gal::csv {

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);

// FIRMS and ICS exports are plain comma-separated without quoting; a quoted
// field is still unwrapped so hand-edited files survive.
std::vector<std::string> split_csv(std::string_view line);

/// Finite decimal only; leading '+' allowed.
bool to_double(std::string_view s, double& out);

/// Throws RowError naming the column on failure.
double field_double(const std::vector<std::string>& fields, std::size_t col, std::size_t row,
                    std::string_view name);

class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Returns false on end of stream. Blank lines are skipped; `row` reports
    // the 1-based data-row index.
    bool next(std::vector<std::string>& fields);
    std::size_t row() const { return row_; }

private:
    std::istream& in_;
    std::size_t row_ = 0;
};

struct Header {
    std::map<std::string, std::size_t> columns; // lowercased name -> index

    std::optional<std::size_t> find(std::initializer_list<std::string_view> names) const;
    std::size_t need(std::initializer_list<std::string_view> names, std::string_view what) const;
};

Header read_header(std::istream& in, std::string_view what);

/// Shortest round-trip decimal.
std::string shortest(double v);

} // namespace gal::csv
