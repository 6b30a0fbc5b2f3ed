#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lpsnn {

// Invalid experiment or component configuration (bad format spec, bad rates,
// inconsistent sizes). Carries every issue found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string issue)
        : std::runtime_error(issue), issues_{std::move(issue)} {}

    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "configuration invalid:";
        for (const auto& s : issues) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

// Base for dataset ingestion failures.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IdxBadMagicError : public DataError {
public:
    using DataError::DataError;
};

class IdxTruncatedError : public DataError {
public:
    using DataError::DataError;
};

class IdxCountMismatchError : public DataError {
public:
    using DataError::DataError;
};

// Operation called on a model that lacks required state (e.g. classify
// before assign_labels).
class ModelStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lpsnn
