#include "nonauto/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nonauto {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("CSV header must be nonempty");
}

void CsvTable::add_row(const std::vector<CsvCell>& cells) {
    if (cells.size() != header_.size())
        throw std::invalid_argument("CSV row width does not match header");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        if (const auto* d = std::get_if<double>(&cells[i]))
            line += format_g17(*d);
        else if (const auto* n = std::get_if<long long>(&cells[i]))
            line += std::to_string(*n);
        else
            line += std::get<std::string>(cells[i]);
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

void CsvTable::save(const std::filesystem::path& path) const {
    write_file_atomic(path, to_string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace nonauto
