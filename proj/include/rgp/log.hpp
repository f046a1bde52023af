#pragma once

#include <string>

namespace rgp::log {

enum class Level { Quiet = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

/// Current verbosity. Initialized once from the RGP_LOG environment
/// variable (quiet|error|warn|info|debug); defaults to info.
Level level();
void set_level(Level lv);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

} // namespace rgp::log
