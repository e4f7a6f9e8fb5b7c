#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace nonauto {

using CsvCell = std::variant<double, long long, std::string>;

/// Doubles formatted with 17 significant digits.
std::string format_g17(double v);

/// Plain CSV with a header row. save() writes to a temp file in the target
/// directory and renames it into place.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<CsvCell>& cells);
    std::size_t rows() const { return rows_.size(); }

    void save(const std::filesystem::path& path) const;
    std::string to_string() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

/// Atomic text write: temp file plus rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace nonauto
