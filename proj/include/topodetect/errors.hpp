#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace topodetect {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the source name and 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string source, int line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    int line() const noexcept { return line_; }

private:
    std::string source_;
    int line_;
};

/// Well-formed input that violates one or more model invariants.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "validation failed:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

/// A topology or experiment configuration refers to something that doesn't exist.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A topology leaves buses unreachable from the slack bus.
class TopologyError : public Error {
public:
    TopologyError(const std::string& topology, std::vector<int> unreachable)
        : Error(message(topology, unreachable)), unreachable_(std::move(unreachable)) {}

    const std::vector<int>& unreachable() const noexcept { return unreachable_; }

private:
    static std::string message(const std::string& topology, const std::vector<int>& buses) {
        std::string out = "topology " + topology + " is disconnected; unreachable buses:";
        for (int b : buses) out += " " + std::to_string(b);
        return out;
    }
    std::vector<int> unreachable_;
};

/// Newton-Raphson ran out of iterations.
class DivergedError : public Error {
public:
    DivergedError(int iterations, double last_mismatch)
        : Error("power flow did not converge after " + std::to_string(iterations) +
                " iterations (max mismatch " + std::to_string(last_mismatch) + " p.u.)"),
          iterations_(iterations), last_mismatch_(last_mismatch) {}

    int iterations() const noexcept { return iterations_; }
    double last_mismatch() const noexcept { return last_mismatch_; }

private:
    int iterations_;
    double last_mismatch_;
};

/// Singular Jacobian or similar linear-algebra breakdown.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A topology library entry could not be computed.
class LibraryError : public Error {
public:
    LibraryError(std::string topology, int time_index, const std::string& cause)
        : Error("library entry (topology " + topology + ", t=" + std::to_string(time_index) +
                "): " + cause),
          topology_(std::move(topology)), time_index_(time_index) {}

    const std::string& topology() const noexcept { return topology_; }
    int time_index() const noexcept { return time_index_; }

private:
    std::string topology_;
    int time_index_;
};

/// Measurements and library disagree about which buses exist.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace topodetect
