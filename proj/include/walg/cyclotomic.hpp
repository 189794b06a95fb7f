#pragma once

#include "walg/rational.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace walg {

struct NotDivisible : std::domain_error {
    NotDivisible() : std::domain_error("order does not divide target order") {}
};

/// Coefficients of the n-th cyclotomic polynomial Phi_n, lowest degree first.
const std::vector<mpz_class> &cyclotomic_polynomial(unsigned n);

/// Element of Q(zeta_n), stored as the canonical reduction mod Phi_n.
/// Mixed-order arithmetic embeds both operands into Q(zeta_lcm) first,
/// so equality-to-zero is always a coefficient comparison.
class Cyclotomic {
  public:
    Cyclotomic() : order_(1), coeffs_(1, Rational(0)) {}
    Cyclotomic(long n) : order_(1), coeffs_(1, Rational(n)) {}
    Cyclotomic(const Rational &r) : order_(1), coeffs_(1, r) {}
    Cyclotomic(unsigned order, std::vector<Rational> poly);

    static Cyclotomic zero() { return Cyclotomic(); }
    static Cyclotomic one() { return Cyclotomic(1l); }
    /// zeta_n^k
    static Cyclotomic root_of_unity(unsigned n, long k);

    unsigned order() const { return order_; }
    const std::vector<Rational> &coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool is_rational() const;
    Rational rational_value() const; // requires is_rational()

    Cyclotomic embed_order(unsigned m) const;
    /// Smallest-order representation within divisors of order().
    Cyclotomic reduced_order() const;

    Cyclotomic operator-() const;
    Cyclotomic &operator+=(const Cyclotomic &o);
    Cyclotomic &operator-=(const Cyclotomic &o);
    Cyclotomic &operator*=(const Cyclotomic &o);
    Cyclotomic &operator/=(const Cyclotomic &o);

    friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic &b) { return a += b; }
    friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic &b) { return a -= b; }
    friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic &b) { return a *= b; }
    friend Cyclotomic operator/(Cyclotomic a, const Cyclotomic &b) { return a /= b; }

    Cyclotomic inv() const;
    Cyclotomic pow(long e) const;

    friend bool operator==(const Cyclotomic &a, const Cyclotomic &b);
    friend bool operator!=(const Cyclotomic &a, const Cyclotomic &b) { return !(a == b); }

    std::string str() const;

  private:
    unsigned order_;
    std::vector<Rational> coeffs_; // size = deg Phi_order
};

/// Exact square root of a rational inside a cyclotomic field
/// (Gauss sums for odd primes, zeta_8 for 2, zeta_4 for the sign).
Cyclotomic sqrt_rational(const Rational &r);

inline Cyclotomic operator*(const Rational &r, Cyclotomic c) { return c *= Cyclotomic(r); }

} // namespace walg
