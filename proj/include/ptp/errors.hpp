#pragma once

#include <stdexcept>
#include <string>

namespace ptp {

// Common base so drivers can map any domain failure to an exit status.
class PtpError : public std::runtime_error {
public:
    explicit PtpError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration content or structure is invalid (missing keys, bad types,
// unresolvable default_configs chains).
class ConfigError : public PtpError {
public:
    explicit ConfigError(const std::string& what) : PtpError(what) {}
};

// Stream/batch contract violation at run time (missing stream, kind or
// shape mismatch, collision on write).
class StreamError : public PtpError {
public:
    explicit StreamError(const std::string& what) : PtpError(what) {}
};

// Numeric contract violation (dimension mismatch, non-finite loss).
class NumericError : public PtpError {
public:
    explicit NumericError(const std::string& what) : PtpError(what) {}
};

// Checkpoint file problems (missing model, shape mismatch, I/O failure).
class CheckpointError : public PtpError {
public:
    explicit CheckpointError(const std::string& what) : PtpError(what) {}
};

// I/O failure outside checkpoints (CSV export, log files).
class IoError : public PtpError {
public:
    explicit IoError(const std::string& what) : PtpError(what) {}
};

}  // namespace ptp
