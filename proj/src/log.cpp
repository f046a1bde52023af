#include "rgp/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace rgp::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("RGP_LOG");
    if (!v) return Level::Info;
    std::string s(v);
    if (s == "quiet") return Level::Quiet;
    if (s == "error") return Level::Error;
    if (s == "warn") return Level::Warn;
    if (s == "debug") return Level::Debug;
    return Level::Info;
}

Level g_level = parse_env();
std::mutex g_mutex;

void emit(const char* tag, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << tag << msg << "\n";
}

} // namespace

Level level() { return g_level; }
void set_level(Level lv) { g_level = lv; }

void error(const std::string& msg) {
    if (g_level >= Level::Error) emit("[error] ", msg);
}
void warn(const std::string& msg) {
    if (g_level >= Level::Warn) emit("[warn] ", msg);
}
void info(const std::string& msg) {
    if (g_level >= Level::Info) emit("[info] ", msg);
}
void debug(const std::string& msg) {
    if (g_level >= Level::Debug) emit("[debug] ", msg);
}

} // namespace rgp::log
