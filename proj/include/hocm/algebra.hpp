// Normal-ordered polynomials in multi-mode bosonic ladder operators.
//
// A NormalPoly is a finite sum of monomials  c * prod_m  o_m^{dag i_m} o_m^{j_m},
// stored with all creation letters of a mode to the left of its annihilation
// letters. Letters on different modes commute, so a monomial is fully described
// by one (i, j) pair per mode. Every operation here returns a normal-ordered
// result; the only non-normal-ordered input type is LadderWord.

#pragma once

#include <complex>
#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hocm {

using Complex = std::complex<double>;
using ModeId = std::string;

/// Coefficients with magnitude at or below this are dropped after arithmetic.
inline constexpr double kPruneThreshold = 1e-15;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponents of one mode inside a normal-ordered monomial: o^{dag cre} o^{ann}.
struct ModePower {
  ModeId mode;
  int cre = 0;
  int ann = 0;

  auto operator<=>(const ModePower&) const = default;
};

/// Sorted by mode label, never contains a (0, 0) entry. The empty key is the
/// identity operator.
using MonomialKey = std::vector<ModePower>;

enum class LetterKind { Create, Annihilate };

struct Letter {
  ModeId mode;
  LetterKind kind = LetterKind::Annihilate;
};

/// An ordered product of ladder letters with a scalar prefactor. Order matters.
struct LadderWord {
  Complex coeff{1.0, 0.0};
  std::vector<Letter> letters;
};

class NormalPoly {
 public:
  using TermMap = std::map<MonomialKey, Complex>;

  NormalPoly() = default;

  static NormalPoly constant(Complex c);
  static NormalPoly annihilator(const ModeId& mode);
  static NormalPoly creator(const ModeId& mode);
  static NormalPoly monomial(MonomialKey key, Complex c = 1.0);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Complex coefficient(const MonomialKey& key) const;
  Complex constant_term() const { return coefficient({}); }

  std::set<ModeId> modes() const;
  /// Largest total letter count of any term.
  int degree() const;
  /// Largest creation or annihilation exponent of `mode` over all terms.
  int max_exponent(const ModeId& mode) const;

  void add_term(const MonomialKey& key, Complex c);

  NormalPoly& operator+=(const NormalPoly& other);
  NormalPoly& operator-=(const NormalPoly& other);
  NormalPoly& operator*=(Complex s);

  friend NormalPoly operator+(NormalPoly a, const NormalPoly& b) { return a += b; }
  friend NormalPoly operator-(NormalPoly a, const NormalPoly& b) { return a -= b; }
  friend NormalPoly operator*(NormalPoly a, Complex s) { return a *= s; }
  friend NormalPoly operator*(Complex s, NormalPoly a) { return a *= s; }
  friend NormalPoly operator-(NormalPoly a) { return a *= -1.0; }

  bool operator==(const NormalPoly&) const = default;

  /// Largest coefficient difference over the union of terms.
  double distance(const NormalPoly& other) const;

  /// Text in the operator-expression grammar; parse_expression() round-trips it.
  std::string to_string() const;

 private:
  TermMap terms_;
};

/// Output mode -> linear combination of input annihilators. Passive maps never
/// mix in creation operators.
struct LinearModeMap {
  std::map<ModeId, std::vector<std::pair<ModeId, Complex>>> rows;
  std::set<ModeId> ancillas;

  std::vector<ModeId> outputs() const;
  std::vector<ModeId> inputs() const;
  /// max |(M M^dag - 1)_{ij}| over the output x input coefficient matrix.
  double unitarity_residual() const;
};

NormalPoly normal_order(const LadderWord& word);
NormalPoly normal_order(const std::vector<LadderWord>& words);
inline NormalPoly normal_order(const NormalPoly& p) { return p; }

NormalPoly multiply(const NormalPoly& p, const NormalPoly& q);
NormalPoly power(const NormalPoly& p, int n);
NormalPoly commutator(const NormalPoly& p, const NormalPoly& q);
NormalPoly dagger(const NormalPoly& p);

/// Replaces every output-mode letter by its expansion over the map's inputs.
/// Throws AlgebraError if `p` references a mode that is not an output of `map`.
NormalPoly substitute(const NormalPoly& p, const LinearModeMap& map);

/// Partial vacuum expectation over `ancillas`: keeps only the terms in which
/// no ancilla letter appears.
NormalPoly vacuum_project(const NormalPoly& p, const std::set<ModeId>& ancillas);

/// Renames modes; `rename` must be injective on the modes of p.
NormalPoly rename_modes(const NormalPoly& p, const std::map<ModeId, ModeId>& rename);

/// Operator-expression grammar, e.g. "(0,1)*a'^2*b - 2*a". Terms are separated
/// by + or -, letters by *, a trailing ' marks a creation letter.
std::vector<LadderWord> parse_words(const std::string& text);
NormalPoly parse_expression(const std::string& text);

}  // namespace hocm
