#pragma once

#include "walg/lattice_va.hpp"
#include "walg/root_system.hpp"

#include <map>
#include <vector>

namespace walg {

struct WindowTooSmall : std::runtime_error {
    WindowTooSmall() : std::runtime_error("laurent window too small for request") {}
};
struct NonConvergent : std::runtime_error {
    NonConvergent() : std::runtime_error("contraction sum does not stabilize") {}
};

/// Fock variable q_k^j: frame index j (0-based), mode k >= 0.
struct VarId {
    int j;
    int k;
    auto operator<=>(const VarId &) const = default;
};

/// Sparse multi-exponent, sorted by variable, exponents > 0.
using MultiIndex = std::vector<std::pair<VarId, int>>;

long mi_length(const MultiIndex &m);                    // total exponent count
MultiIndex mi_mul(const MultiIndex &a, const MultiIndex &b);
int mi_max_mode(const MultiIndex &m);

struct LaurentWindow {
    Rational min_power = Rational(-8);
    Rational max_power = Rational(8);
    bool contains(const Rational &r) const { return min_power <= r && r <= max_power; }
};

/// Expansion topology for operator composition: around lambda = infinity
/// (the lambda^{-1}-adic sense) or around a finite point.
enum class Topology { at_infinity, at_point };

/// Monomial of the polynomial Fock module with its hbar^{1/2} grading.
struct PolyKey {
    MultiIndex mono;
    int hbar_half = 0;
    auto operator<=>(const PolyKey &) const = default;
};

class PolyVec {
  public:
    PolyVec() = default;
    static PolyVec one() {
        PolyVec v;
        v.terms_[PolyKey{}] = Cyclotomic::one();
        return v;
    }
    static PolyVec monomial(MultiIndex m, int hbar_half = 0) {
        PolyVec v;
        v.terms_[PolyKey{std::move(m), hbar_half}] = Cyclotomic::one();
        return v;
    }
    void add_term(const PolyKey &k, const Cyclotomic &c) {
        if (c.is_zero())
            return;
        auto it = terms_.find(k);
        if (it == terms_.end())
            terms_.emplace(k, c);
        else {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }
    const std::map<PolyKey, Cyclotomic> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    PolyVec &operator+=(const PolyVec &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, c);
        return *this;
    }
    PolyVec &operator-=(const PolyVec &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, -c);
        return *this;
    }
    friend PolyVec operator+(PolyVec a, const PolyVec &b) { return a += b; }
    friend PolyVec operator-(PolyVec a, const PolyVec &b) { return a -= b; }
    PolyVec operator*(const Cyclotomic &c) const {
        PolyVec r;
        for (auto &[k, v] : terms_)
            r.add_term(k, v * c);
        return r;
    }
    friend bool operator==(const PolyVec &a, const PolyVec &b) { return (a - b).is_zero(); }
    int max_mode() const {
        int m = -1;
        for (auto &[k, c] : terms_)
            m = std::max(m, mi_max_mode(k.mono));
        return m;
    }

  private:
    std::map<PolyKey, Cyclotomic> terms_;
};

/// Normally ordered differential operator on C_hbar[q], graded by half
/// powers of hbar (== l(J) - l(I)) with rational lambda exponents.
class NormalOrderedOperator {
  public:
    struct Key {
        MultiIndex q;      // I
        MultiIndex dq;     // J
        Rational lambda;   // lambda exponent
        auto operator<=>(const Key &) const = default;
    };

    NormalOrderedOperator() = default;

    void add_term(const Key &k, const Cyclotomic &c) {
        if (c.is_zero())
            return;
        auto it = terms_.find(k);
        if (it == terms_.end())
            terms_.emplace(k, c);
        else {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }
    const std::map<Key, Cyclotomic> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    static int hbar_half(const Key &k) { return (int)(mi_length(k.dq) - mi_length(k.q)); }

    NormalOrderedOperator &operator+=(const NormalOrderedOperator &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, c);
        tail_unbounded_ = tail_unbounded_ || o.tail_unbounded_;
        return *this;
    }
    NormalOrderedOperator &operator-=(const NormalOrderedOperator &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, -c);
        tail_unbounded_ = tail_unbounded_ || o.tail_unbounded_;
        return *this;
    }
    friend NormalOrderedOperator operator+(NormalOrderedOperator a,
                                           const NormalOrderedOperator &b) {
        return a += b;
    }
    friend NormalOrderedOperator operator-(NormalOrderedOperator a,
                                           const NormalOrderedOperator &b) {
        return a -= b;
    }
    NormalOrderedOperator operator*(const Cyclotomic &c) const {
        NormalOrderedOperator r;
        r.tail_unbounded_ = tail_unbounded_;
        for (auto &[k, v] : terms_)
            r.add_term(k, v * c);
        return r;
    }
    friend bool operator==(const NormalOrderedOperator &a, const NormalOrderedOperator &b) {
        return (a - b).is_zero();
    }

    /// normal-ordered product (q's and dq's merged, no contractions)
    NormalOrderedOperator normal_product(const NormalOrderedOperator &o) const;
    /// multiply by c * lambda^e
    NormalOrderedOperator shift_lambda(const Rational &e, const Cyclotomic &c) const;
    /// d/dlambda
    NormalOrderedOperator d_lambda() const;
    NormalOrderedOperator truncate(const LaurentWindow &w) const;
    /// coefficient of lambda^e, as an operator with lambda power 0
    NormalOrderedOperator lambda_coefficient(const Rational &e) const;
    bool lambda_powers_integral() const;

    /// apply to a polynomial vector; lambda power -> result
    std::map<Rational, PolyVec> apply(const PolyVec &v) const;
    /// apply an operator with a single lambda power (or lambda-free)
    PolyVec apply_flat(const PolyVec &v) const;

    /// Weyl-algebra composition (this after o), contractions included.
    /// When both operands are truncations of unbounded mode families, the
    /// contraction sum must visibly stabilize below the stored depth, else
    /// NonConvergent is raised.
    NormalOrderedOperator compose(const NormalOrderedOperator &o,
                                  Topology topology = Topology::at_infinity) const;

    bool tail_unbounded() const { return tail_unbounded_; }
    void mark_tail_unbounded() { tail_unbounded_ = true; }

  private:
    std::map<Key, Cyclotomic> terms_;
    bool tail_unbounded_ = false;
};

/// The sigma-twisted Fock module of an ADE lattice vertex algebra, realized
/// by differential operators with exact cyclotomic coefficients.
class TwistedModule {
  public:
    explicit TwistedModule(const VertexAlgebra &va);

    const VertexAlgebra &algebra() const { return va_; }
    const EigenFrame &frame() const { return frame_; }
    int rank() const { return va_.rank(); }
    unsigned h() const { return va_.root_system().coxeter_number(); }

    /// exponent p_j = m_j/h of frame vector v_j
    Rational p_of(int j) const;

    /// Y(v_j, lambda) truncated to the window and mode depth
    NormalOrderedOperator generator_field(int j, const LaurentWindow &w, int kmax) const;
    /// Y(v^j, lambda) = Y(v_{N+1-j}, lambda), the field of the dual frame vector
    NormalOrderedOperator twisted_generator(int j, const LaurentWindow &w, int kmax) const;

    /// exact application of Y(v_j, lambda) keeping lambda powers in [lo, hi]
    std::map<Rational, PolyVec> apply_generator(int j, const PolyVec &v, const Rational &lo,
                                                const Rational &hi) const;

    /// P^k coefficient for a frame pair: value c with P^k(lambda) = c lambda^{-k-2}
    Cyclotomic propagator_coeff(int a, int b, int k) const;
    /// same for arbitrary h-vectors given in frame coordinates
    Cyclotomic propagator_coeff(const std::vector<Cyclotomic> &alpha,
                                const std::vector<Cyclotomic> &beta, int k) const;

    /// Wick pair factor for slots (alpha, k_a), (beta, k_b); a single
    /// lambda monomial c * lambda^{-k_a-k_b-2}
    Cyclotomic wick_pair_coeff(int a, int ka, int b, int kb) const;

    /// Y(a, lambda) for a in the Fock part, assembled via the Wick formula
    NormalOrderedOperator twisted_field(const LatticeState &a, const LaurentWindow &w,
                                        int kmax) const;

    /// Faa di Bruno S_n(alpha, lambda) as a normally ordered operator
    NormalOrderedOperator schur_field(const std::vector<Cyclotomic> &alpha_frame, int n,
                                      const LaurentWindow &w, int kmax) const;

    /// Taylor coefficient c_k^alpha of Lemma-style series around x = 1
    Cyclotomic c_coeff(const IVec &alpha, int k) const;

    /// right-hand side of the twisted lattice operator identity:
    /// (-1)^{...} sum_k c_k^alpha lambda^{-k} S_{|a|^2-1+d-k}(alpha, lambda)
    NormalOrderedOperator e_pair_field(const IVec &alpha, int d, const LaurentWindow &w,
                                       int kmax) const;

    /// U_alpha scalars (basis values 1, extended multiplicatively)
    Cyclotomic u_scalar(const IVec &alpha) const;

    /// Gamma-type exponential vertex operator, truncated
    NormalOrderedOperator vertex_operator(const IVec &alpha, const LaurentWindow &w, int kmax,
                                          int max_factors) const;

    /// iota_mu iota_lambda expansion of prod_k (mu^{1/h}-zeta^k lambda^{1/h})^{(sigma^k a|b)}
    /// as a series in y = (lambda/mu)^{1/h}; exponent of the leading (1-y)
    /// factor is (a|b) and `unit` is the value of the remaining factors at y=1
    struct PhaseExpansion {
        std::map<long, Cyclotomic> y_series;
        long xi_exponent = 0;
        Cyclotomic unit;
    };
    PhaseExpansion phase_factor(const IVec &alpha, const IVec &beta, int terms) const;

    /// Twisted product formula check on a test vector:
    /// (1/k!) d^k_{z1} [(z1-z2)^N Y(a,z1)Y(b,z2)c]|_{z1=z2} = Y(a_{(N-1-k)}b, z2)c
    /// for frame generators a = v_{ja}, b = v_{jb}; compares coefficients with
    /// |power| <= target_range
    bool twisted_product_check(int ja, int jb, int k, const PolyVec &c,
                               const Rational &target_range) const;

    /// convert a Fock-part state to frame creation slots:
    /// list of (coefficient, [(frame j, k = depth-1), ...])
    std::vector<std::pair<Cyclotomic, std::vector<std::pair<int, int>>>>
    frame_slots(const LatticeState &a) const;

  private:
    const VertexAlgebra &va_;
    EigenFrame frame_;
    std::vector<std::vector<Cyclotomic>> basis_in_frame_; // e_i = sum_j coeff v_j
    mutable std::map<IVec, Cyclotomic> u_cache_;
};

} // namespace walg
