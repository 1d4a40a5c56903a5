#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

// Bad user-supplied values: configs, out-of-range parameters, inconsistent
// inputs. The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk data (.mxds, .mxmd, CIFAR rows). Messages name the byte
// offset where parsing failed.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : ValidationError {
    explicit ShapeError(const std::string& msg) : ValidationError(msg) {}
};

// Asking a component for something it cannot provide (e.g. input gradients
// from an uninitialized model).
struct CapabilityError : std::runtime_error {
    explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training loss went non-finite. Carries the global step for diagnostics;
// the runner marks the seed failed and the CLI exits 3.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, long step)
        : std::runtime_error(msg), step(step) {}
    long step;
};

}  // namespace mixlab
