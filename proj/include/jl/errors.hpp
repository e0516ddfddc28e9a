#pragma once

#include <stdexcept>
#include <string>

namespace jl {

// Numerical routine failed to converge within its documented budget.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failure while reading or writing artifact files.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}
