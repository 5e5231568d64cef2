#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stfv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conservative or primitive state with nonpositive density or pressure.
class InvalidStateError : public Error {
 public:
  InvalidStateError(double rho, double p, const std::string& context)
      : Error(context + ": invalid state (rho=" + std::to_string(rho) +
              ", p=" + std::to_string(p) + ")"),
        rho_(rho),
        p_(p) {}

  double rho() const noexcept { return rho_; }
  double pressure() const noexcept { return p_; }

 private:
  double rho_;
  double p_;
};

/// Entropy variables that do not map back to an admissible state (v3 >= 0).
class InvalidEntropyVarsError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The straight entropy-variable path between two states left the admissible
/// set at a quadrature node.
class PathInadmissibleError : public Error {
 public:
  PathInadmissibleError(std::size_t node, double xi)
      : Error("entropy-variable path inadmissible at quadrature node " +
              std::to_string(node) + " (xi=" + std::to_string(xi) + ")"),
        node_(node),
        xi_(xi) {}

  std::size_t node() const noexcept { return node_; }
  double xi() const noexcept { return xi_; }

 private:
  std::size_t node_;
  double xi_;
};

/// Dissipation operator that is not symmetric positive definite, or a spec
/// attached to the wrong direction.
class DissipationSpecError : public Error {
 public:
  using Error::Error;
};

/// Newton failure on a time slab (or block of slabs).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int slab, int iterations,
              double residual)
      : Error(what + " (slab " + std::to_string(slab) + ", iterations " +
              std::to_string(iterations) + ", residual " +
              std::to_string(residual) + ")"),
        slab_(slab),
        iterations_(iterations),
        residual_(residual) {}

  int slab() const noexcept { return slab_; }
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int slab_;
  int iterations_;
  double residual_;
};

/// Riemann data whose exact solution contains a vacuum.
class VacuumError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration. `field` is a JSON pointer,
/// `line` is 1-based or 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message,
              int line = 0)
      : Error(format(field, message, line)), field_(field), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field,
                            const std::string& message, int line) {
    std::string out = "config error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " in " + field;
    return out + ": " + message;
  }

  std::string field_;
  int line_;
};

}  // namespace stfv
