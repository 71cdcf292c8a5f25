#ifndef LINSEL_ERRORS_HPP
#define LINSEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace linsel {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed problem document or expression text. Carries a location hint.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& what) : Error(what), position_(0) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Evaluation left the domain of a node (sqrt of a negative argument).
class DomainError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its contract (e.g. projecting onto an
/// empty fiber).
class ContractError : public Error {
public:
  using Error::Error;
};

}  // namespace linsel

#endif
