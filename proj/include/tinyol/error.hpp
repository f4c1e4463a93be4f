#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tinyol {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape error: " + msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error("domain error: " + msg) {}
};

// Binary container parse/validate failures; carries the byte offset.
struct FormatError : std::runtime_error {
    FormatError(const std::string& msg, std::size_t offset)
        : std::runtime_error("format error at byte " + std::to_string(offset) + ": " + msg),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error("capacity error: " + msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error("unsupported: " + msg) {}
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, std::vector<double> curve)
        : std::runtime_error("convergence failure: " + msg), loss_curve(std::move(curve)) {}
    std::vector<double> loss_curve;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io error: " + msg) {}
};

}  // namespace tinyol
