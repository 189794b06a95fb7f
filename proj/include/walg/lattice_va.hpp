#pragma once

#include "walg/root_system.hpp"

#include <compare>
#include <map>
#include <optional>
#include <vector>

namespace walg {

struct NotInFock : std::domain_error {
    NotInFock() : std::domain_error("state has nonzero lattice charge") {}
};
struct InadmissibleLambda0 : std::domain_error {
    InadmissibleLambda0() : std::domain_error("(lambda_0|alpha) outside {0,+-1} for some root") {}
};
struct TruncationExceeded : std::runtime_error {
    TruncationExceeded() : std::runtime_error("state weight exceeds configured truncation") {}
};

/// Normal-ordered product of Heisenberg creation modes applied to the vacuum:
/// factors (n, i) stand for (basis vector e_i)_{(-n)}, n >= 1.
struct FockMonomial {
    std::vector<std::pair<int, int>> factors; // sorted ascending (n, i)

    long weight() const {
        long w = 0;
        for (auto &[n, i] : factors)
            w += n;
        return w;
    }
    auto operator<=>(const FockMonomial &) const = default;
};

struct StateKey {
    FockMonomial mono;
    IVec gamma;
    auto operator<=>(const StateKey &) const = default;
};

/// Element of V_Q: finite linear combination of Fock monomials attached to
/// lattice points, with cyclotomic coefficients.
class LatticeState {
  public:
    LatticeState() = default;

    static LatticeState vacuum(int rank) {
        LatticeState s;
        s.terms_[StateKey{{}, IVec((size_t)rank, 0)}] = Cyclotomic::one();
        return s;
    }
    static LatticeState lattice_point(const IVec &gamma) {
        LatticeState s;
        s.terms_[StateKey{{}, gamma}] = Cyclotomic::one();
        return s;
    }

    void add_term(const StateKey &k, const Cyclotomic &c) {
        if (c.is_zero())
            return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    const std::map<StateKey, Cyclotomic> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    LatticeState &operator+=(const LatticeState &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, c);
        return *this;
    }
    LatticeState &operator-=(const LatticeState &o) {
        for (auto &[k, c] : o.terms_)
            add_term(k, -c);
        return *this;
    }
    friend LatticeState operator+(LatticeState a, const LatticeState &b) { return a += b; }
    friend LatticeState operator-(LatticeState a, const LatticeState &b) { return a -= b; }
    LatticeState operator*(const Cyclotomic &c) const {
        LatticeState r;
        if (c.is_zero())
            return r;
        for (auto &[k, v] : terms_)
            r.terms_[k] = v * c;
        return r;
    }
    friend bool operator==(const LatticeState &a, const LatticeState &b) {
        return (a - b).is_zero();
    }

    bool in_fock() const {
        for (auto &[k, c] : terms_)
            for (long g : k.gamma)
                if (g != 0)
                    return false;
        return true;
    }

  private:
    std::map<StateKey, Cyclotomic> terms_;
};

/// The lattice vertex algebra V_Q for an ADE root system: mode actions,
/// n-th products, screening operators and the W-algebra element builders.
class VertexAlgebra {
  public:
    explicit VertexAlgebra(char type_letter, int rank, long weight_bound = 12);

    const RootSystem &root_system() const { return rs_; }
    const CoxeterElement &coxeter_element() const { return cox_; }
    const SeifertData &seifert() const { return seifert_; }
    int rank() const { return rs_.rank(); }
    long weight_bound() const { return weight_bound_; }
    void set_weight_bound(long b) { weight_bound_ = b; }

    /// L_0-weight of a term: sum of depths + |gamma|^2/2
    long term_weight(const StateKey &k) const;
    long state_weight(const LatticeState &s) const; // max over terms, 0 if empty

    LatticeState vacuum() const { return LatticeState::vacuum(rs_.rank()); }

    /// creation/annihilation/zero mode of an h-vector with cyclotomic coords
    LatticeState heis_mode(const std::vector<Cyclotomic> &alpha, int m,
                           const LatticeState &a) const;
    LatticeState heis_mode_basis(int i, int m, const LatticeState &a) const;
    LatticeState heis_mode_rational(const std::vector<Rational> &alpha, int m,
                                    const LatticeState &a) const;

    /// n-th mode of Y(e^alpha, zeta) for a lattice point alpha
    LatticeState e_mode(const IVec &alpha, int n, const LatticeState &a) const;

    /// a_{(n)} b for arbitrary states
    LatticeState nth_product(const LatticeState &a, const LatticeState &b, int n) const;

    LatticeState screening(const IVec &alpha, const LatticeState &a) const;
    bool in_w_algebra(const LatticeState &a) const;

    LatticeState build_omega() const;
    LatticeState build_omega_d(int d) const;
    LatticeState build_pi_n() const; // type D only
    LatticeState build_nu_d(const std::vector<Rational> &lambda0, int d) const;
    /// default admissible lambda_0 used by the CLI (fundamental weight)
    std::vector<Rational> default_lambda0() const;
    std::vector<std::vector<Rational>> weyl_orbit(const std::vector<Rational> &lambda0) const;

    bool borcherds_check(const LatticeState &a, const LatticeState &b, const LatticeState &c,
                         int m, int n, int k) const;

    /// L_m x = omega_{(m+1)} x
    LatticeState virasoro_mode(const LatticeState &omega, int m, const LatticeState &x) const;

    /// basis of all states of weight <= wmax (Fock monomials x lattice points)
    std::vector<StateKey> weight_basis(long wmax) const;

    void clear_memo() const { memo_.clear(); }

  private:
    RootSystem rs_;
    CoxeterElement cox_;
    SeifertData seifert_;
    Mat<Rational> gram_inv_;
    long weight_bound_;

    mutable std::map<std::tuple<StateKey, StateKey, int>, LatticeState> memo_;

    LatticeState term_nth_product(const StateKey &a, const StateKey &b, int n) const;
    LatticeState nth_product_term_state(const StateKey &a, const LatticeState &b, int n) const;
    void check_weight(const LatticeState &s) const;
};

} // namespace walg
