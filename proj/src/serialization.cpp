#include "polybill/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "polybill/config.hpp"

namespace polybill {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_number(long x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { add(header); rows_ = 0; }

void CsvWriter::add(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ << ',';
        buf_ << cells[i];
    }
    buf_ << '\n';
    ++rows_;
}

void CsvWriter::save(const std::filesystem::path& path) const { save_text(path, buf_.str()); }

void save_json(const std::filesystem::path& path, const nlohmann::json& j) { save_text(path, j.dump(2) + "\n"); }

void save_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace polybill
