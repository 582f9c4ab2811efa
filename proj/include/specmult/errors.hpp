#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace specmult {

// Error taxonomy shared by the library and the CLI exit codes:
//   verification failure -> 1, usage/config -> 2, cap exceeded -> 3,
//   missing/mismatched stage dependency -> 4.

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what, int exit_code)
        : std::runtime_error(what), code_(std::move(code)), exit_code_(exit_code) {}
    const std::string& code() const { return code_; }
    int exit_code() const { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

struct VerificationError : Error {
    VerificationError(std::string code, const std::string& what)
        : Error(std::move(code), what, 1) {}
};

struct ConfigError : Error {
    ConfigError(std::string code, const std::string& what)
        : Error(std::move(code), what, 2) {}
};

struct CapError : Error {
    CapError(std::string code, const std::string& what)
        : Error(std::move(code), what, 3) {}
};

struct DependencyError : Error {
    DependencyError(std::string code, const std::string& what)
        : Error(std::move(code), what, 4) {}
};

}  // namespace specmult
