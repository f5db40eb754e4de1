// High-order quadrature elements and vectors.
//
// An element is Q or P of the product operator O = (prod_i o_i^{f_i})^s:
//   Q = (O + O^dag)/2,   P = i(O^dag - O)/2.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "hocm/algebra.hpp"

namespace hocm {

struct QuadratureFactor {
  ModeId mode;
  int exponent = 1;

  bool operator==(const QuadratureFactor&) const = default;
};

struct QuadratureElement {
  enum class Kind { Q, P };

  Kind kind = Kind::Q;
  std::vector<QuadratureFactor> factors;
  int power = 1;

  std::set<ModeId> support() const;
  /// Total letter count of O, i.e. s * sum f_i.
  int order() const;
  /// Factor list and power as text, e.g. "Q{1 a2, 3 b2}^2".
  std::string to_string() const;
};

struct QuadratureVectorSpec {
  std::string name;
  std::vector<QuadratureElement> elements;

  std::size_t dim() const { return elements.size(); }
  std::size_t pairs() const { return elements.size() / 2; }
  /// Moment order n of the covariance matrix: lowest plus highest element order.
  int order() const;
  std::set<ModeId> modes() const;
  std::string to_string() const;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

NormalPoly quadrature_poly(const QuadratureElement& elem);

/// Grammar: element (";" element)*, element = ("Q"|"P") "{" <int> <mode> ("," ...)* "}" ["^" s].
/// Elements must come as consecutive Q, P pairs with identical factors and power.
QuadratureVectorSpec parse_vector(const std::string& name, const std::string& text);

/// Checks element validity and (Q, P) pairing; throws QuadratureError.
void validate_vector(const QuadratureVectorSpec& spec);

/// Same vector with every element's power multiplied by `factor`.
QuadratureVectorSpec lift_power(const QuadratureVectorSpec& spec, int factor, std::string name);

}  // namespace hocm
