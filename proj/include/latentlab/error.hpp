#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace latentlab {

// Every error raised by the library derives from Error so callers can catch
// the family at once; the concrete type names the failure.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class NoValidStart : public Error {
public:
  using Error::Error;
};

class NoPath : public Error {
public:
  using Error::Error;
};

class InvalidPath : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class SpecError : public Error {
public:
  using Error::Error;
};

class MatrixError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class NumericalDivergence : public Error {
public:
  NumericalDivergence(std::size_t index, const std::string& what)
      : Error(what + " (iterate " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

class FormatError : public Error {
public:
  FormatError(std::size_t offset, const std::string& what)
      : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

// A failure inside a batch, tagged with the maze or trajectory it hit.
class ExperimentError : public Error {
public:
  ExperimentError(std::string item, const std::string& what) : Error(item + ": " + what), item_(std::move(item)) {}

  const std::string& item() const noexcept { return item_; }

private:
  std::string item_;
};

}  // namespace latentlab
