#pragma once

#include <stdexcept>
#include <string>

namespace magsim {

// Every failure raised by the library carries a short machine-readable
// category; the CLI prints it on stderr and maps it to an exit code.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Postselection probability at or below the dark-port floor.
class DarkPortError : public Error {
public:
    explicit DarkPortError(const std::string& what) : Error("dark_port", what) {}
};

// Both detector channels empty.
class NoSignalError : public Error {
public:
    explicit NoSignalError(const std::string& what) : Error("no_signal", what) {}
};

// Integration grid or parameter set that cannot be run as requested.
class ConfigurationError : public Error {
public:
    explicit ConfigurationError(const std::string& what) : Error("configuration", what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("config_parse", what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("config_validation", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

} // namespace magsim
