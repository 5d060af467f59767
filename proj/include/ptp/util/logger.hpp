#pragma once

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

namespace ptp::util {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3 };

inline const char* log_level_name(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return "DEBUG";
        case LogLevel::info: return "INFO";
        case LogLevel::warning: return "WARNING";
        case LogLevel::error: return "ERROR";
    }
    return "?";
}

inline bool parse_log_level(std::string_view text, LogLevel& out) {
    if (text == "debug") out = LogLevel::debug;
    else if (text == "info") out = LogLevel::info;
    else if (text == "warning") out = LogLevel::warning;
    else if (text == "error") out = LogLevel::error;
    else return false;
    return true;
}

// Level-prefixed line logger writing to stderr and, once configured, to the
// experiment log file.
class Logger {
public:
    void set_level(LogLevel level) { level_ = level; }
    LogLevel level() const { return level_; }

    void open_file(const std::string& path) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (file_.is_open()) file_.close();
        file_.clear();
        file_.open(path, std::ios::out | std::ios::trunc);
    }

    void close_file() {
        std::lock_guard<std::mutex> lock(mutex_);
        if (file_.is_open()) file_.close();
    }

    void set_console(bool enabled) { console_ = enabled; }

    void log(LogLevel level, std::string_view message) {
        if (level < level_) return;
        std::lock_guard<std::mutex> lock(mutex_);
        std::ostringstream line;
        line << '[' << log_level_name(level) << "] " << message << '\n';
        if (console_) std::cerr << line.str();
        if (file_.is_open()) {
            file_ << line.str();
            file_.flush();
        }
    }

    void debug(std::string_view m) { log(LogLevel::debug, m); }
    void info(std::string_view m) { log(LogLevel::info, m); }
    void warning(std::string_view m) { log(LogLevel::warning, m); }
    void error(std::string_view m) { log(LogLevel::error, m); }

private:
    LogLevel level_ = LogLevel::info;
    bool console_ = true;
    std::ofstream file_;
    std::mutex mutex_;
};

inline Logger& logger() {
    static Logger instance;
    return instance;
}

}  // namespace ptp::util
