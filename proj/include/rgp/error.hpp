#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace rgp {

/// Error raised by any pipeline operation whose contract is violated
/// or whose input data is malformed. The message carries the context
/// (stage name, file path, line number) needed to locate the cause.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void cat_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void cat_into(std::ostringstream& os, const T& first, const Rest&... rest) {
    os << first;
    cat_into(os, rest...);
}
} // namespace detail

template <typename... Parts>
std::string cat(const Parts&... parts) {
    std::ostringstream os;
    detail::cat_into(os, parts...);
    return os.str();
}

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
    throw Error(cat(parts...));
}

} // namespace rgp
