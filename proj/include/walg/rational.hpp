#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace walg {

struct DivisionByZero : std::domain_error {
    DivisionByZero() : std::domain_error("division by zero") {}
};

/// Arbitrary-precision rational, always in canonical form
/// (gcd(|num|, den) = 1, den > 0).
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) : v_(n, d) {
        if (d == 0)
            throw DivisionByZero();
        v_.canonicalize();
    }
    explicit Rational(const mpq_class &q) : v_(q) { v_.canonicalize(); }
    explicit Rational(const mpz_class &z) : v_(z) {}
    explicit Rational(const std::string &s) : v_(s) { v_.canonicalize(); }

    static Rational from_parts(const mpz_class &num, const mpz_class &den) {
        if (den == 0)
            throw DivisionByZero();
        mpq_class q(num);
        q /= mpq_class(den);
        return Rational(q);
    }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational &operator+=(const Rational &o) { v_ += o.v_; return *this; }
    Rational &operator-=(const Rational &o) { v_ -= o.v_; return *this; }
    Rational &operator*=(const Rational &o) { v_ *= o.v_; return *this; }
    Rational &operator/=(const Rational &o) {
        if (o.is_zero())
            throw DivisionByZero();
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational &b) { return a += b; }
    friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

    friend bool operator==(const Rational &a, const Rational &b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    Rational inv() const {
        if (is_zero())
            throw DivisionByZero();
        return Rational(mpq_class(1) / v_);
    }

    std::string str() const { return v_.get_str(); }

    const mpq_class &raw() const { return v_; }

  private:
    mpq_class v_;
};

inline Rational pow(const Rational &b, long e) {
    if (e == 0)
        return Rational(1);
    Rational base = e < 0 ? b.inv() : b;
    unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
    Rational r(1);
    while (n) {
        if (n & 1)
            r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

inline mpz_class factorial(unsigned long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

/// Binomial coefficient with integer arguments, n >= 0.
inline mpz_class binomial_z(const mpz_class &top, unsigned long n) {
    mpz_class r;
    mpz_bin_ui(r.get_mpz_t(), top.get_mpz_t(), n);
    return r;
}

/// Generalized binomial coefficient p(p-1)...(p-j+1)/j! for rational p.
inline Rational gen_binomial(const Rational &p, unsigned long j) {
    Rational r(1);
    for (unsigned long s = 0; s < j; ++s)
        r *= (p - Rational((long)s)) / Rational((long)(s + 1));
    return r;
}

/// Pochhammer symbol (x)_k = x(x+1)...(x+k-1), with (x)_0 = 1.
inline Rational pochhammer(const Rational &x, unsigned long k) {
    Rational r(1);
    for (unsigned long s = 0; s < k; ++s)
        r *= x + Rational((long)s);
    return r;
}

inline mpz_class double_factorial(long n) {
    // (-1)!! = 1 by convention
    if (n <= 0)
        return 1;
    mpz_class r;
    mpz_2fac_ui(r.get_mpz_t(), (unsigned long)n);
    return r;
}

} // namespace walg
