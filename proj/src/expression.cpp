#include <cctype>
#include <cstdlib>

#include "hocm/algebra.hpp"

namespace hocm {

namespace {

class WordParser {
 public:
  explicit WordParser(const std::string& text) : s_(text) {}

  std::vector<LadderWord> parse() {
    std::vector<LadderWord> words;
    skip();
    if (at_end()) throw error("empty expression");
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') sign = take() == '-' ? -1.0 : 1.0;
    words.push_back(term(sign));
    while (true) {
      skip();
      if (at_end()) break;
      char op = take();
      if (op != '+' && op != '-') throw error(std::string("unexpected '") + op + "'");
      words.push_back(term(op == '-' ? -1.0 : 1.0));
    }
    return words;
  }

 private:
  LadderWord term(double sign) {
    LadderWord w;
    w.coeff = sign;
    factor(w);
    while (true) {
      skip();
      if (at_end() || peek() != '*') break;
      ++pos_;
      factor(w);
    }
    return w;
  }

  void factor(LadderWord& w) {
    skip();
    if (at_end()) throw error("expected a factor");
    char c = peek();
    if (c == '(') {
      ++pos_;
      double re = number();
      expect(',');
      double im = number();
      expect(')');
      w.coeff *= Complex(re, im);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      w.coeff *= number();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      ModeId mode = s_.substr(start, pos_ - start);
      LetterKind kind = LetterKind::Annihilate;
      if (!at_end() && peek() == '\'') {
        kind = LetterKind::Create;
        ++pos_;
      }
      long count = 1;
      skip();
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip();
        std::size_t digits = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (digits == pos_) throw error("expected integer exponent");
        count = std::strtol(s_.c_str() + digits, nullptr, 10);
      }
      for (long i = 0; i < count; ++i) w.letters.push_back({mode, kind});
    } else {
      throw error(std::string("unexpected '") + c + "'");
    }
  }

  double number() {
    skip();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw error("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  void expect(char c) {
    skip();
    if (at_end() || peek() != c) throw error(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }

  AlgebraError error(const std::string& what) const {
    return AlgebraError("expression parse error at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<LadderWord> parse_words(const std::string& text) { return WordParser(text).parse(); }

NormalPoly parse_expression(const std::string& text) { return normal_order(parse_words(text)); }

}  // namespace hocm
