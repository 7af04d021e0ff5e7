#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

namespace polybill {

// Shortest round-trip decimal form, always with '.' as separator.
std::string format_number(double x);
std::string format_number(long x);
inline std::string format_number(int x) { return format_number(static_cast<long>(x)); }
inline std::string format_number(bool x) { return x ? "1" : "0"; }

// Buffers a CSV table and writes it in one go; rows must match the header width.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    template <class... Ts>
    void row(const Ts&... cells) {
        static_assert(sizeof...(Ts) > 0);
        std::vector<std::string> r{format_cell(cells)...};
        add(r);
    }
    void add(const std::vector<std::string>& cells);
    std::size_t rows() const { return rows_; }
    std::string str() const { return buf_.str(); }
    // Throws IoError when the file cannot be written.
    void save(const std::filesystem::path& path) const;

private:
    static std::string format_cell(const std::string& s) { return s; }
    static std::string format_cell(const char* s) { return s; }
    template <class T>
    static std::string format_cell(const T& x) {
        if constexpr (std::is_floating_point_v<T>) return format_number(static_cast<double>(x));
        else if constexpr (std::is_same_v<T, bool>) return format_number(x);
        else return format_number(static_cast<long>(x));
    }

    std::size_t width_;
    std::size_t rows_ = 0;
    std::ostringstream buf_;
};

// Pretty-printed JSON followed by a newline. Throws IoError on failure.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);
void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace polybill
