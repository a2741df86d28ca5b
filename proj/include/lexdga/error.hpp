#pragma once

#include <stdexcept>
#include <string>

namespace lexdga {

/// Bad or inconsistent input data (malformed CSV, single-class corpus, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (k out of range, bad fraction).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Model file could not be decoded.
class ModelFormatError : public DataError {
public:
    using DataError::DataError;
};

class ModelVersionError : public ModelFormatError {
public:
    ModelVersionError(const std::string& expected, const std::string& found)
        : ModelFormatError("model format version mismatch: expected " + expected + ", found " + found),
          expected_(expected), found_(found) {}

    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::string expected_;
    std::string found_;
};

class CorruptModelError : public ModelFormatError {
public:
    using ModelFormatError::ModelFormatError;
};

/// Ensemble selection found no feature with enough votes.
class NoConsensusError : public DataError {
public:
    NoConsensusError(int threshold)
        : DataError("no consensus: no feature reached " + std::to_string(threshold) +
                    " votes; retry with threshold 1"),
          threshold_(threshold) {}

    int threshold() const noexcept { return threshold_; }

private:
    int threshold_;
};

}  // namespace lexdga
