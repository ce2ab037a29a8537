#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace synthcoupling::cli {

/// Shortest decimal that round-trips to the same double; "nan" for NaN.
std::string format_double(double v);
std::string format_list(const std::vector<double>& values);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_; }
    std::string str() const { return text_; }

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

/// INI-style run record: ordered [sections] of key = value lines.
class Manifest {
public:
    using Section = std::vector<std::pair<std::string, std::string>>;

    void set(const std::string& section, const std::string& key, const std::string& value);
    void set(const std::string& section, const std::string& key, double value);
    std::string str() const;

private:
    Section& section(const std::string& name);
    std::vector<std::pair<std::string, Section>> sections_;
};

} // namespace synthcoupling::cli
