#pragma once

#include <stdexcept>
#include <string>

namespace mvsde {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : Error {
  using Error::Error;
};

struct NotNormalizable : Error {
  using Error::Error;
};

struct BracketFailure : Error {
  using Error::Error;
};

struct WindowTooSmall : Error {
  using Error::Error;
};

struct NoSignChange : Error {
  using Error::Error;
};

struct NotApplicable : Error {
  using Error::Error;
};

struct Divergence : Error {
  using Error::Error;
};

struct ConstructionFailure : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

}  // namespace mvsde
