#pragma once

#include <stdexcept>
#include <string>

namespace ridetect {

/// Malformed input text; carries the source location for diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, long line, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const { return file_; }
    long line() const { return line_; }

private:
    std::string file_;
    long line_;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training loss left the finite range; records the epoch where it happened.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, const std::string& message)
        : std::runtime_error("epoch " + std::to_string(epoch) + ": " + message),
          epoch_(epoch) {}

    int epoch() const { return epoch_; }

private:
    int epoch_;
};

}  // namespace ridetect
