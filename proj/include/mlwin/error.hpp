#pragma once

#include <stdexcept>
#include <string>

namespace mlwin {

// Error classes; the CLI maps each to an exit code.
enum class ErrorKind {
  invalid_spec,     // argument outside the operation's contract
  size,             // lengths / counts out of range
  shape,            // mismatched grids or lengths between two inputs
  degenerate,       // zero-energy window and similar
  zero_magnitude,   // spectral zero that blocks log-magnitude processing
  numeric,          // root finder or recursion broke down
  classification,   // input is not of the required polynomial class
  model_violation,  // signal violates the adaptive harmonic model
  parse,            // malformed input file
  unreliable,       // measurement could not be trusted (e.g. ridge gaps)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace mlwin
