#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcl {

// Invalid input for an operation (precondition violated, wrong domain).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// The equation has no solution over the integers.
class no_solution_error : public domain_error {
public:
    explicit no_solution_error(const std::string& what) : domain_error(what) {}
};

// Input is valid but exceeds the configured work budget; the call is refused
// rather than silently truncated.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Not enough candidates to build the requested tuple; carries the number of
// candidates that were available.
class insufficient_tuple_space : public domain_error {
public:
    insufficient_tuple_space(const std::string& what, std::uint64_t available)
        : domain_error(what), available_(available) {}
    std::uint64_t available() const { return available_; }

private:
    std::uint64_t available_;
};

} // namespace pcl
