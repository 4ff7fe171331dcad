#include "mcsim/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace mcsim::csv {

std::string format(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf.data(), res.ptr);
}

std::string format(std::int64_t value)
{
    return std::to_string(value);
}

std::string field(std::string_view text)
{
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace mcsim::csv
