#include "defilab/error.hpp"

#include <utility>

namespace defilab {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

ResourceLimitError::ResourceLimitError(const std::string& what, std::string subformula)
    : Error(what + (subformula.empty() ? std::string() : " while eliminating: " + subformula)),
      subformula_(std::move(subformula)) {}

}  // namespace defilab
