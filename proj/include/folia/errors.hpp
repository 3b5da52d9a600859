#pragma once

#include <stdexcept>
#include <string>

namespace folia {

struct NonMonotone : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadSupport : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfWindow : std::runtime_error {
    OutOfWindow(int n, const std::string& what) : std::runtime_error(what), index(n) {}
    int index;
};

struct WindowExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an exact evaluation is requested through a numeric backend
// away from its control grid.
struct NotExactlyEvaluable : std::logic_error {
    using std::logic_error::logic_error;
};

struct WrongClass : std::runtime_error {
    WrongClass(const std::string& generator, const std::string& what)
        : std::runtime_error(what), generator(generator) {}
    std::string generator;
};

struct UnregisteredFactor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SlotConflict : std::runtime_error {
    SlotConflict(int vertex, const std::string& what) : std::runtime_error(what), vertex(vertex) {}
    int vertex;
};

struct DeadEnd : std::runtime_error {
    DeadEnd(int vertex, const std::string& what) : std::runtime_error(what), vertex(vertex) {}
    int vertex;
};

struct CompactBoundaryPresent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFoundAtDepth : std::runtime_error {
    NotFoundAtDepth(int depth, const std::string& what) : std::runtime_error(what), depth(depth) {}
    int depth;
};

struct NoSafeSupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace folia
