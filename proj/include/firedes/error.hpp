#ifndef FIREDES_ERROR_HPP
#define FIREDES_ERROR_HPP

#include <stdexcept>
#include <string>

namespace firedes {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed KEEL input. The message names the offending line.
class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what, const std::string& source = {})
        : error((source.empty() ? "" : source + ":") + "line " + std::to_string(line) + ": " + what),
          line_(line),
          detail_(what) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// The problem is well formed but outside what the engine handles (e.g. not binary).
class unsupported_problem : public error {
public:
    using error::error;
};

/// Too few samples for the requested split or neighbourhood.
class insufficient_data : public error {
public:
    using error::error;
};

/// A caller broke a documented precondition.
class contract_error : public error {
public:
    using error::error;
};

class degenerate_bootstrap : public error {
public:
    using error::error;
};

/// A metric is undefined for the given input (e.g. AUC with a single class).
class undefined_metric : public error {
public:
    using error::error;
};

} // namespace firedes

#endif // FIREDES_ERROR_HPP
