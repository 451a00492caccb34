#pragma once

#include <stdexcept>
#include <string>

namespace f4f {

// Error taxonomy mirrors the process exit codes: validation errors (bad
// files, schemas, shapes, configs) exit 1, runtime/training failures exit 2.
enum class ErrorKind { validation = 1, runtime = 2 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg)
        : Error(ErrorKind::validation, msg) {}
};

class DimensionError : public ValidationError {
public:
    explicit DimensionError(const std::string& msg) : ValidationError(msg) {}
};

class TrainingDivergedError : public Error {
public:
    explicit TrainingDivergedError(const std::string& msg)
        : Error(ErrorKind::runtime, msg) {}
};

}  // namespace f4f
