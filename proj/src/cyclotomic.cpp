#include "walg/cyclotomic.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>

namespace walg {

namespace {

// Exact division of integer polynomials, remainder must vanish.
std::vector<mpz_class> poly_div_exact(std::vector<mpz_class> num,
                                      const std::vector<mpz_class> &den) {
    std::vector<mpz_class> q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, 0);
    for (long i = (long)num.size() - (long)den.size(); i >= 0; --i) {
        mpz_class c = num[i + den.size() - 1] / den.back();
        q[i] = c;
        if (c != 0)
            for (size_t j = 0; j < den.size(); ++j)
                num[i + j] -= c * den[j];
    }
    for (const auto &c : num)
        if (c != 0)
            throw std::logic_error("cyclotomic polynomial division not exact");
    return q;
}

unsigned euler_phi(unsigned n) {
    unsigned result = n;
    for (unsigned p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0)
                n /= p;
            result -= result / p;
        }
    if (n > 1)
        result -= result / n;
    return result;
}

} // namespace

const std::vector<mpz_class> &cyclotomic_polynomial(unsigned n) {
    static std::map<unsigned, std::vector<mpz_class>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    if (n == 0 || n > 3600)
        throw std::domain_error("cyclotomic order out of range");
    // Phi_n = (x^n - 1) / prod_{d|n, d<n} Phi_d
    std::vector<mpz_class> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    std::vector<std::vector<mpz_class>> divisors_phi;
    for (unsigned d = 1; d < n; ++d)
        if (n % d == 0) {
            // compute recursively without re-locking: inline the recursion
            // via cache lookups filled in increasing order
            auto sub = cache.find(d);
            if (sub == cache.end()) {
                // fill all divisors bottom-up
                std::vector<mpz_class> dnum(d + 1, 0);
                dnum[0] = -1;
                dnum[d] = 1;
                for (unsigned e = 1; e < d; ++e)
                    if (d % e == 0)
                        dnum = poly_div_exact(std::move(dnum), cache.at(e));
                cache.emplace(d, std::move(dnum));
            }
            num = poly_div_exact(std::move(num), cache.at(d));
        }
    auto [ins, ok] = cache.emplace(n, std::move(num));
    (void)ok;
    return ins->second;
}

Cyclotomic::Cyclotomic(unsigned order, std::vector<Rational> poly) : order_(order) {
    const auto &phi = cyclotomic_polynomial(order);
    size_t deg = phi.size() - 1;
    // reduce poly mod Phi_order
    while (poly.size() > deg) {
        Rational c = poly.back();
        size_t top = poly.size() - 1;
        poly.pop_back();
        if (!c.is_zero())
            for (size_t j = 0; j < deg; ++j)
                poly[top - deg + j] -= c * Rational(phi[j]);
    }
    poly.resize(deg, Rational(0));
    coeffs_ = std::move(poly);
}

Cyclotomic Cyclotomic::root_of_unity(unsigned n, long k) {
    long kk = ((k % (long)n) + (long)n) % (long)n;
    std::vector<Rational> p((size_t)kk + 1, Rational(0));
    p[(size_t)kk] = Rational(1);
    return Cyclotomic(n, std::move(p));
}

bool Cyclotomic::is_zero() const {
    for (const auto &c : coeffs_)
        if (!c.is_zero())
            return false;
    return true;
}

bool Cyclotomic::is_rational() const {
    for (size_t i = 1; i < coeffs_.size(); ++i)
        if (!coeffs_[i].is_zero())
            return false;
    // in Q(zeta_1), coeff is taken at zeta = 1; in general the constant term
    // of the reduced representation is the rational value iff the rest vanish
    return true;
}

Rational Cyclotomic::rational_value() const {
    if (!is_rational())
        throw std::logic_error("not a rational cyclotomic value");
    return coeffs_[0];
}

Cyclotomic Cyclotomic::embed_order(unsigned m) const {
    if (m % order_ != 0)
        throw NotDivisible();
    if (m == order_)
        return *this;
    unsigned k = m / order_;
    std::vector<Rational> p(coeffs_.size() * (size_t)k + 1, Rational(0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        p[i * k] += coeffs_[i];
    return Cyclotomic(m, std::move(p));
}

Cyclotomic Cyclotomic::reduced_order() const {
    if (is_rational())
        return Cyclotomic(coeffs_[0]);
    for (unsigned d = 2; d < order_; ++d) {
        if (order_ % d != 0)
            continue;
        unsigned phd = euler_phi(d);
        if (phd >= coeffs_.size())
            continue;
        // solve for *this in the span of the embedded basis of Q(zeta_d)
        size_t n = coeffs_.size();
        std::vector<std::vector<Rational>> cols;
        for (unsigned i = 0; i < phd; ++i)
            cols.push_back(Cyclotomic::root_of_unity(d, (long)i).embed_order(order_).coeffs());
        // gaussian elimination on the (n x phd | rhs) system
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(phd + 1, Rational(0)));
        for (size_t r = 0; r < n; ++r) {
            for (unsigned c = 0; c < phd; ++c)
                m[r][c] = cols[c][r];
            m[r][phd] = coeffs_[r];
        }
        size_t row = 0;
        std::vector<long> piv(phd, -1);
        for (unsigned c = 0; c < phd && row < n; ++c) {
            size_t p = row;
            while (p < n && m[p][c].is_zero())
                ++p;
            if (p == n)
                continue;
            std::swap(m[p], m[row]);
            Rational dgt = m[row][c];
            for (unsigned j = c; j <= phd; ++j)
                m[row][j] /= dgt;
            for (size_t i = 0; i < n; ++i) {
                if (i == row || m[i][c].is_zero())
                    continue;
                Rational f = m[i][c];
                for (unsigned j = c; j <= phd; ++j)
                    m[i][j] -= f * m[row][j];
            }
            piv[c] = (long)row;
            ++row;
        }
        bool consistent = true;
        for (size_t r = row; r < n; ++r)
            if (!m[r][phd].is_zero())
                consistent = false;
        if (!consistent)
            continue;
        std::vector<Rational> down(phd, Rational(0));
        for (unsigned c = 0; c < phd; ++c)
            if (piv[c] >= 0)
                down[c] = m[(size_t)piv[c]][phd];
        Cyclotomic cand(d, down);
        if (cand.embed_order(order_) == *this)
            return cand;
    }
    return *this;
}

Cyclotomic Cyclotomic::operator-() const {
    Cyclotomic r = *this;
    for (auto &c : r.coeffs_)
        c = -c;
    return r;
}

Cyclotomic &Cyclotomic::operator+=(const Cyclotomic &o) {
    if (order_ != o.order_) {
        unsigned m = (unsigned)std::lcm(order_, o.order_);
        *this = embed_order(m);
        return *this += o.embed_order(m);
    }
    for (size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] += o.coeffs_[i];
    return *this;
}

Cyclotomic &Cyclotomic::operator-=(const Cyclotomic &o) { return *this += -o; }

Cyclotomic &Cyclotomic::operator*=(const Cyclotomic &o) {
    if (order_ != o.order_) {
        unsigned m = (unsigned)std::lcm(order_, o.order_);
        *this = embed_order(m);
        return *this *= o.embed_order(m);
    }
    std::vector<Rational> prod(coeffs_.size() + o.coeffs_.size(), Rational(0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        if (!coeffs_[i].is_zero())
            for (size_t j = 0; j < o.coeffs_.size(); ++j)
                if (!o.coeffs_[j].is_zero())
                    prod[i + j] += coeffs_[i] * o.coeffs_[j];
    *this = Cyclotomic(order_, std::move(prod));
    return *this;
}

Cyclotomic Cyclotomic::inv() const {
    if (is_zero())
        throw DivisionByZero();
    // extended Euclid in Q[x] against Phi_n (irreducible over Q)
    const auto &phiz = cyclotomic_polynomial(order_);
    std::vector<Rational> r0(phiz.size());
    for (size_t i = 0; i < phiz.size(); ++i)
        r0[i] = Rational(phiz[i]);
    std::vector<Rational> r1 = coeffs_;
    while (!r1.empty() && r1.back().is_zero())
        r1.pop_back();
    std::vector<Rational> s0{Rational(0)}, s1{Rational(1)}; // coeffs of *this
    auto deg = [](const std::vector<Rational> &p) { return (long)p.size() - 1; };
    while (deg(r1) > 0) {
        // r0 = q*r1 + r2
        std::vector<Rational> q(deg(r0) - deg(r1) + 1, Rational(0));
        std::vector<Rational> rem = r0;
        for (long i = deg(r0) - deg(r1); i >= 0; --i) {
            Rational c = rem[i + deg(r1)] / r1.back();
            q[i] = c;
            if (!c.is_zero())
                for (size_t j = 0; j < r1.size(); ++j)
                    rem[i + j] -= c * r1[j];
        }
        while (!rem.empty() && rem.back().is_zero())
            rem.pop_back();
        // s2 = s0 - q*s1
        std::vector<Rational> s2(std::max(s0.size(), q.size() + s1.size()), Rational(0));
        for (size_t i = 0; i < s0.size(); ++i)
            s2[i] = s0[i];
        for (size_t i = 0; i < q.size(); ++i)
            if (!q[i].is_zero())
                for (size_t j = 0; j < s1.size(); ++j)
                    s2[i + j] -= q[i] * s1[j];
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r1.empty())
        throw std::logic_error("cyclotomic inverse: unexpected common factor");
    Rational lead = r1[0];
    for (auto &c : s1)
        c /= lead;
    return Cyclotomic(order_, std::move(s1));
}

Cyclotomic &Cyclotomic::operator/=(const Cyclotomic &o) { return *this *= o.inv(); }

Cyclotomic Cyclotomic::pow(long e) const {
    if (e == 0)
        return one();
    Cyclotomic base = e < 0 ? inv() : *this;
    unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
    Cyclotomic r = one();
    while (n) {
        if (n & 1)
            r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

bool operator==(const Cyclotomic &a, const Cyclotomic &b) {
    if (a.order_ == b.order_)
        return a.coeffs_ == b.coeffs_;
    unsigned m = (unsigned)std::lcm(a.order_, b.order_);
    return a.embed_order(m).coeffs_ == b.embed_order(m).coeffs_;
}

std::string Cyclotomic::str() const {
    if (is_rational())
        return coeffs_[0].str();
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero())
            continue;
        if (!first)
            os << " + ";
        first = false;
        os << coeffs_[i].str();
        if (i > 0)
            os << "*z" << order_ << "^" << i;
    }
    if (first)
        os << "0";
    return os.str();
}

Cyclotomic sqrt_rational(const Rational &r) {
    if (r.is_zero())
        return Cyclotomic::zero();
    // sqrt(sgn * a/b) = sqrt(sgn * a * b) / b
    mpz_class a = abs(r.num());
    mpz_class b = r.den();
    mpz_class t = a * b;
    // strip square part
    mpz_class sq = 1, d = 1;
    for (mpz_class p = 2; p * p <= t;) {
        if (t % p == 0) {
            unsigned e = 0;
            while (t % p == 0) {
                t /= p;
                ++e;
            }
            for (unsigned i = 0; i + 1 < e; i += 2)
                sq *= p;
            if (e % 2)
                d *= p;
        }
        p += (p == 2) ? 1 : 2;
    }
    d *= t; // remaining prime
    Cyclotomic result(Rational::from_parts(sq, b));
    if (r.sign() < 0)
        result *= Cyclotomic::root_of_unity(4, 1);
    // d is squarefree and positive; build sqrt(d) prime by prime
    mpz_class dd = d;
    for (mpz_class p = 2; p <= dd; p += (p == 2) ? 1 : 2) {
        if (dd % p != 0)
            continue;
        dd /= p;
        if (p == 2) {
            result *= Cyclotomic::root_of_unity(8, 1) + Cyclotomic::root_of_unity(8, 7);
        } else {
            unsigned up = (unsigned)p.get_ui();
            Cyclotomic gauss = Cyclotomic::zero();
            for (unsigned k = 1; k < up; ++k) {
                int leg = mpz_legendre(mpz_class(k).get_mpz_t(), p.get_mpz_t());
                if (leg == 1)
                    gauss += Cyclotomic::root_of_unity(up, k);
                else
                    gauss -= Cyclotomic::root_of_unity(up, k);
            }
            // gauss^2 = p for p = 1 mod 4, -p for p = 3 mod 4
            if (up % 4 == 3)
                gauss *= Cyclotomic::root_of_unity(4, 3); // divide by i
            result *= gauss;
        }
    }
    return result;
}

} // namespace walg
