#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace freestein {

/// Exact complex-rational number re + i*im.
class Coeff {
 public:
  Coeff() = default;
  Coeff(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  Coeff(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {  // NOLINT
    re_.canonicalize();
    im_.canonicalize();
  }

  /// p/q as an exact rational, q != 0.
  static Coeff ratio(long num, long den) { return Coeff(mpq_class(num, den)); }
  static Coeff imag_unit() { return Coeff(mpq_class(0), mpq_class(1)); }
  /// Exact rational value of a double (every finite double is a dyadic rational).
  static Coeff from_double(std::complex<double> z) { return Coeff(mpq_class(z.real()), mpq_class(z.imag())); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  Coeff conj() const { return Coeff(re_, -im_); }
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  Coeff& operator+=(const Coeff& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Coeff& operator-=(const Coeff& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  Coeff& operator*=(const Coeff& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
  friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
  friend Coeff operator*(Coeff a, const Coeff& b) { return a *= b; }
  friend Coeff operator-(const Coeff& a) { return Coeff(-a.re_, -a.im_); }
  friend bool operator==(const Coeff& a, const Coeff& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

  std::string to_string() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace freestein
