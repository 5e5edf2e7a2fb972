#include "slowvary/algebra/scalar.hpp"

#include "slowvary/error.hpp"

#include <cctype>

namespace slowvary::algebra {

Scalar::Scalar(long num, long den) {
  if (den == 0) throw AlgebraError("zero denominator");
  re_ = mpq_class(num, den);
  re_.canonicalize();
}

Scalar::Scalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

Scalar Scalar::i() { return Scalar(mpq_class(0), mpq_class(1)); }

Scalar& Scalar::operator+=(const Scalar& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class r = re_ * o.re_ - im_ * o.im_;
  mpq_class m = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(m);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw AlgebraError("division by zero scalar");
  if (o.is_real()) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

std::complex<double> Scalar::to_complex() const { return {re_.get_d(), im_.get_d()}; }

std::string rational_str(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string Scalar::str() const {
  if (is_real()) return rational_str(re_);
  std::string imag;
  if (im_ == 1) {
    imag = "i";
  } else if (im_ == -1) {
    imag = "-i";
  } else {
    imag = rational_str(im_) + "*i";
  }
  if (sgn(re_) == 0) return imag;
  std::string out = "(" + rational_str(re_);
  if (imag[0] != '-') out += "+";
  return out + imag + ")";
}

namespace {

// Minimal reader for the forms produced by str(); general expressions go
// through the expression parser instead.
class ScalarReader {
 public:
  explicit ScalarReader(std::string_view s) : s_(s) {}

  Scalar read_all() {
    Scalar v = read_sum();
    if (pos_ != s_.size()) throw ParseError("unexpected character in scalar", pos_);
    return v;
  }

 private:
  Scalar read_sum() {
    Scalar acc = read_signed();
    while (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) acc += read_signed();
    return acc;
  }

  Scalar read_signed() {
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    Scalar v = read_atom();
    return neg ? -v : v;
  }

  Scalar read_atom() {
    if (pos_ >= s_.size()) throw ParseError("unexpected end of scalar", pos_);
    if (s_[pos_] == '(') {
      ++pos_;
      Scalar v = read_sum();
      if (pos_ >= s_.size() || s_[pos_] != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return v;
    }
    if (s_[pos_] == 'i') {
      ++pos_;
      return Scalar::i();
    }
    mpq_class q = read_rational();
    if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == 'i') {
      pos_ += 2;
      return Scalar(0, q);
    }
    return Scalar(q);
  }

  mpq_class read_rational() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected digit", pos_);
    std::string text(s_.substr(start, pos_ - start));
    if (pos_ < s_.size() && s_[pos_] == '/') {
      std::size_t dstart = ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (dstart == pos_) throw ParseError("expected denominator", pos_);
      text += "/" + std::string(s_.substr(dstart, pos_ - dstart));
    }
    mpq_class q(text);
    if (q.get_den() == 0) throw ParseError("zero denominator", start);
    q.canonicalize();
    return q;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Scalar Scalar::parse(std::string_view text) { return ScalarReader(text).read_all(); }

}  // namespace slowvary::algebra
