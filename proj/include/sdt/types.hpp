#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sdt {

// Scalar type used throughout.
using Scalar = double;

template <int rows = Eigen::Dynamic, int cols = rows>
using Matrix = Eigen::Matrix<Scalar, rows, cols>;

template <int rows = Eigen::Dynamic>
using Vector = Eigen::Matrix<Scalar, rows, 1>;

template <int rows = Eigen::Dynamic>
using ArrayVector = Eigen::Array<Scalar, rows, 1>;

using Index = Eigen::Index;

/// Bad user input: unknown labels, out-of-range parameters, malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or otherwise impossible value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Treatment : std::uint8_t { a = 0, b = 1 };

inline char to_char(Treatment t) { return t == Treatment::a ? 'a' : 'b'; }

/// What a singleton rule does when the data do not single out a treatment.
enum class TiePolicy { choose_a, choose_b, randomize };

TiePolicy parse_tie_policy(const std::string& s);
std::string to_string(TiePolicy p);

/// Feasible outcome distributions: A leaves observed and unobserved outcome
/// distributions unrelated, B bounds their success probabilities within 1/2.
enum class Panel { A, B };

Panel parse_panel(const std::string& s);
char to_char(Panel p);

/// Probability-valued parameter check shared by all state types.
inline void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace sdt
