#include "hocm/quadrature.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace hocm {

std::set<ModeId> QuadratureElement::support() const {
  std::set<ModeId> s;
  for (const auto& f : factors) s.insert(f.mode);
  return s;
}

int QuadratureElement::order() const {
  int n = 0;
  for (const auto& f : factors) n += f.exponent;
  return n * power;
}

std::string QuadratureElement::to_string() const {
  std::string out = kind == Kind::Q ? "Q{" : "P{";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(factors[i].exponent) + " " + factors[i].mode;
  }
  out += "}";
  if (power != 1) out += "^" + std::to_string(power);
  return out;
}

int QuadratureVectorSpec::order() const {
  if (elements.empty()) return 0;
  int lo = elements.front().order(), hi = lo;
  for (const auto& e : elements) {
    lo = std::min(lo, e.order());
    hi = std::max(hi, e.order());
  }
  return lo + hi;
}

std::set<ModeId> QuadratureVectorSpec::modes() const {
  std::set<ModeId> s;
  for (const auto& e : elements)
    for (const auto& f : e.factors) s.insert(f.mode);
  return s;
}

std::string QuadratureVectorSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) out += "; ";
    out += elements[i].to_string();
  }
  return out;
}

NormalPoly quadrature_poly(const QuadratureElement& elem) {
  if (elem.factors.empty()) throw QuadratureError("quadrature element has no factors");
  if (elem.power < 1) throw QuadratureError("quadrature power must be >= 1");
  MonomialKey ann, cre;
  for (const auto& f : elem.factors) {
    if (f.exponent < 1)
      throw QuadratureError("zero or negative exponent on mode '" + f.mode + "'");
    ann.push_back({f.mode, 0, f.exponent * elem.power});
    cre.push_back({f.mode, f.exponent * elem.power, 0});
  }
  // Letters of distinct modes commute, so (prod o^f)^s is the single monomial prod o^{fs}.
  NormalPoly o = NormalPoly::monomial(ann);
  NormalPoly od = NormalPoly::monomial(cre);
  if (elem.kind == QuadratureElement::Kind::Q) return (o + od) * Complex(0.5, 0.0);
  return (od - o) * Complex(0.0, 0.5);
}

void validate_vector(const QuadratureVectorSpec& spec) {
  if (spec.elements.empty()) throw QuadratureError("vector '" + spec.name + "' is empty");
  if (spec.elements.size() % 2)
    throw QuadratureError("vector '" + spec.name + "' has an unpaired element");
  for (std::size_t i = 0; i < spec.elements.size(); i += 2) {
    const auto& q = spec.elements[i];
    const auto& p = spec.elements[i + 1];
    if (q.kind != QuadratureElement::Kind::Q || p.kind != QuadratureElement::Kind::P)
      throw QuadratureError("vector '" + spec.name + "': element " + std::to_string(i + 1) +
                            " must be Q followed by P");
    if (q.factors != p.factors || q.power != p.power)
      throw QuadratureError("vector '" + spec.name + "': elements " + std::to_string(i + 1) +
                            " and " + std::to_string(i + 2) + " differ in factors or power");
    if (q.factors.empty()) throw QuadratureError("element without factors");
    if (q.power < 1) throw QuadratureError("quadrature power must be >= 1");
    std::set<ModeId> seen;
    for (const auto& f : q.factors) {
      if (f.exponent < 1)
        throw QuadratureError("zero or negative exponent on mode '" + f.mode + "'");
      if (!seen.insert(f.mode).second)
        throw QuadratureError("mode '" + f.mode + "' repeated inside one element");
    }
  }
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool done() {
    skip();
    return pos >= s.size();
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  QuadratureError error(const std::string& what) const {
    return QuadratureError("vector parse error at column " + std::to_string(pos + 1) + ": " + what);
  }
  void expect(char c) {
    if (peek() != c) throw error(std::string("expected '") + c + "'");
    ++pos;
  }
  int integer() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw error("expected integer");
    return std::atoi(s.substr(start, pos - start).c_str());
  }
  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos || std::isdigit(static_cast<unsigned char>(s[start])))
      throw error("expected mode label");
    return s.substr(start, pos - start);
  }
};

QuadratureElement parse_element(Cursor& c) {
  QuadratureElement e;
  char k = c.peek();
  if (k == 'Q') e.kind = QuadratureElement::Kind::Q;
  else if (k == 'P') e.kind = QuadratureElement::Kind::P;
  else throw c.error("expected Q or P");
  ++c.pos;
  c.expect('{');
  while (true) {
    QuadratureFactor f;
    f.exponent = c.integer();
    if (f.exponent == 0) throw c.error("zero exponent");
    f.mode = c.ident();
    e.factors.push_back(std::move(f));
    if (c.peek() == ',') {
      ++c.pos;
      continue;
    }
    c.expect('}');
    break;
  }
  if (c.peek() == '^') {
    ++c.pos;
    e.power = c.integer();
    if (e.power == 0) throw c.error("zero power");
  }
  return e;
}

}  // namespace

QuadratureVectorSpec parse_vector(const std::string& name, const std::string& text) {
  QuadratureVectorSpec spec;
  spec.name = name;
  Cursor c{text};
  if (c.done()) throw QuadratureError("vector '" + name + "' is empty");
  spec.elements.push_back(parse_element(c));
  while (!c.done()) {
    c.expect(';');
    spec.elements.push_back(parse_element(c));
  }
  validate_vector(spec);
  return spec;
}

QuadratureVectorSpec lift_power(const QuadratureVectorSpec& spec, int factor, std::string name) {
  QuadratureVectorSpec out = spec;
  out.name = std::move(name);
  for (auto& e : out.elements) e.power *= factor;
  return out;
}

}  // namespace hocm
