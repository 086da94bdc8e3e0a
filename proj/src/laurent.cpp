#include "fmmkit/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "fmmkit/error.hpp"

namespace fmmkit {

LaurentScalar::LaurentScalar(const Rational& c, int exponent) {
  if (!c.is_zero()) terms_.emplace_back(exponent, c);
}

Rational LaurentScalar::coefficient(int k) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                             [](const Term& t, int e) { return t.first < e; });
  if (it != terms_.end() && it->first == k) return it->second;
  return Rational{};
}

LaurentScalar LaurentScalar::leading_monomial() const {
  if (terms_.empty()) throw ContractError("leading monomial of zero");
  return {terms_.front().second, terms_.front().first};
}

std::size_t LaurentScalar::height() const {
  std::size_t h = 0;
  for (const auto& t : terms_) h = std::max(h, t.second.height());
  return h;
}

LaurentScalar LaurentScalar::shifted(int k) const {
  LaurentScalar out = *this;
  for (auto& t : out.terms_) t.first += k;
  return out;
}

std::string LaurentScalar::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += c.to_string();
    if (k != 0) out += "*e^" + std::to_string(k);
  }
  return out;
}

LaurentScalar LaurentScalar::operator-() const {
  LaurentScalar out = *this;
  for (auto& t : out.terms_) t.second = -t.second;
  return out;
}

LaurentScalar& LaurentScalar::operator+=(const LaurentScalar& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      Rational s = a->second + b->second;
      if (!s.is_zero()) merged.emplace_back(a->first, std::move(s));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

LaurentScalar& LaurentScalar::operator-=(const LaurentScalar& o) { return *this += -o; }

LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b) {
  LaurentScalar out;
  if (a.terms_.empty() || b.terms_.empty()) return out;
  if (a.terms_.size() == 1 && b.terms_.size() == 1) {
    out.terms_.emplace_back(a.terms_[0].first + b.terms_[0].first, a.terms_[0].second * b.terms_[0].second);
    return out;
  }
  std::map<int, Rational> acc;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) acc[ka + kb] += ca * cb;
  for (auto& [k, c] : acc)
    if (!c.is_zero()) out.terms_.emplace_back(k, std::move(c));
  return out;
}

LaurentScalar& LaurentScalar::operator*=(const LaurentScalar& o) { return *this = *this * o; }

LaurentScalar LaurentScalar::divided_by_monomial(const LaurentScalar& unit) const {
  if (!unit.is_monomial()) throw ContractError("division by a non-monomial Laurent scalar");
  LaurentScalar out = *this;
  const auto& [k, c] = unit.terms_.front();
  for (auto& t : out.terms_) {
    t.first -= k;
    t.second /= c;
  }
  return out;
}

namespace {

// Recursive-descent reader for:  scalar := monomial (('+' | '-') monomial)*
//                                monomial := rational ['*e^' integer]
class ScalarReader {
 public:
  explicit ScalarReader(std::string_view s) : s_(s) {}

  LaurentScalar read() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("empty scalar");
    LaurentScalar total = monomial(false);
    for (;;) {
      skip_ws();
      if (pos_ == s_.size()) break;
      const char op = s_[pos_];
      if (op != '+' && op != '-') fail_at_token();
      ++pos_;
      skip_ws();
      total += monomial(op == '-');
    }
    return total;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail_at_token() {
    std::size_t end = pos_;
    while (end < s_.size() && !std::isspace(static_cast<unsigned char>(s_[end]))) ++end;
    const std::string tok(s_.substr(pos_, std::max<std::size_t>(end - pos_, 1)));
    throw ParseError("unexpected token '" + tok + "' in scalar '" + std::string(s_) + "'");
  }

  LaurentScalar monomial(bool negate) {
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
    const std::string_view rat = s_.substr(start, pos_ - start);
    if (rat.empty() || rat == "-") {
      pos_ = start;
      fail_at_token();
    }
    Rational c = Rational::parse(rat);
    int k = 0;
    if (pos_ < s_.size() && s_[pos_] == '*') {
      if (s_.substr(pos_, 3) != "*e^") fail_at_token();
      pos_ += 3;
      const std::size_t es = pos_;
      if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
      const std::size_t digits = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = es;
        fail_at_token();
      }
      k = std::stoi(std::string(s_.substr(es, pos_ - es)));
    }
    if (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '+' &&
        s_[pos_] != '-')
      fail_at_token();
    return {negate ? -c : c, k};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

LaurentScalar LaurentScalar::parse(std::string_view text) { return ScalarReader(text).read(); }

}  // namespace fmmkit
