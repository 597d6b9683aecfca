#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gspq::cli {

using Json = nlohmann::ordered_json;

/// "%.17g"; round-trips every finite double.
std::string format_double(double v);

/// JSON text with 2-space indent, LF line ends and every float printed by
/// format_double (non-finite floats become null).
std::string to_json_text(const Json& j);

/// A CSV row failed to parse. `row` counts file lines from 1 (the header).
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t row)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column position by name; throws CsvError(row 1) when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Comma-separated, header row mandatory, every data field numeric
/// (true/false read as 1/0). Blank lines are rejected.
CsvTable read_csv(std::istream& in);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes bytes verbatim (binary mode). Throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& bytes);

}  // namespace gspq::cli
