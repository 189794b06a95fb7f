#pragma once

#include "walg/cyclotomic.hpp"
#include "walg/linalg.hpp"
#include "walg/rational.hpp"

#include <string>
#include <vector>

namespace walg {

struct UnsupportedType : std::domain_error {
    explicit UnsupportedType(const std::string &what) : std::domain_error(what) {}
};
struct NotARoot : std::domain_error {
    NotARoot() : std::domain_error("vector is not a root") {}
};

using IVec = std::vector<long>; // lattice vector, coords in the simple-root basis
using IMat = std::vector<std::vector<long>>;

/// ADE root system on the simple-root basis. The Gram matrix of the
/// normalized invariant form coincides with the Cartan matrix.
class RootSystem {
  public:
    static RootSystem build(char type_letter, int rank);

    char type() const { return type_; }
    int rank() const { return rank_; }
    unsigned coxeter_number() const { return h_; }
    const std::vector<int> &exponents() const { return exponents_; }
    const IMat &cartan() const { return cartan_; }
    const IMat &gram() const { return cartan_; }
    const std::vector<IVec> &roots() const { return roots_; }

    long pairing(const IVec &a, const IVec &b) const;
    bool is_root(const IVec &a) const;
    IVec reflect(const IVec &alpha, const IVec &beta) const; // r_alpha(beta)
    IVec simple_root(int i) const;                           // 0-based

    /// Fundamental weight omega_i (0-based), rational coords.
    std::vector<Rational> fundamental_weight(int i) const;

    std::string name() const;

  private:
    char type_ = 'A';
    int rank_ = 0;
    unsigned h_ = 0;
    std::vector<int> exponents_;
    IMat cartan_;
    std::vector<IVec> roots_;
};

struct CoxeterElement {
    std::vector<int> word; // simple reflection indices, 0-based
    IMat matrix;           // action on simple-root coordinates

    IVec apply(const IVec &v) const;
    std::vector<Rational> apply(const std::vector<Rational> &v) const;
};

/// sigma = r_{alpha_1} ... r_{alpha_N}; order is exactly h.
CoxeterElement coxeter(const RootSystem &rs);

/// Seifert form L(a,b) = ((1-sigma)^{-1} a | b) and the sign cocycle
/// eps = (-1)^L, both on the simple-root basis.
class SeifertData {
  public:
    SeifertData(const RootSystem &rs, const CoxeterElement &cox);

    long L(const IVec &a, const IVec &b) const;
    int epsilon(const IVec &a, const IVec &b) const; // +1 or -1
    const IMat &L_matrix() const { return Lmat_; }

  private:
    IMat Lmat_;
};

/// B_{alpha,beta} = h^{-(alpha|beta)} prod_{k=1}^{h-1} (1-zeta_h^k)^{(sigma^k alpha|beta)}
Cyclotomic b_scalar(const RootSystem &rs, const CoxeterElement &cox, const IVec &alpha,
                    const IVec &beta);

/// sigma-eigenbasis v_1..v_N over a cyclotomic field, ordered by exponent,
/// normalized so that (v_i|v_j) = delta_{i+j,N+1}.
class EigenFrame {
  public:
    EigenFrame(const RootSystem &rs, const CoxeterElement &cox);

    unsigned field_order() const { return field_order_; }
    int rank() const { return (int)vectors_.size(); }
    /// frame vector v_j (0-based j), coords in the simple-root basis
    const std::vector<Cyclotomic> &vector(int j) const { return vectors_[j]; }
    int exponent(int j) const { return mj_[j]; }
    /// index of the partner with (v_j | v_{partner}) = 1
    int partner(int j) const { return (int)vectors_.size() - 1 - j; }

    Cyclotomic pair(const std::vector<Cyclotomic> &x, const std::vector<Cyclotomic> &y) const;
    /// coefficients of an h-vector in the frame basis: x = sum_j coeff_j v_j
    std::vector<Cyclotomic> frame_coordinates(const std::vector<Cyclotomic> &x) const;

  private:
    unsigned field_order_;
    std::vector<std::vector<Cyclotomic>> vectors_;
    std::vector<int> mj_;
    Mat<Cyclotomic> gram_;       // rational Gram embedded in the field
    Mat<Cyclotomic> dual_coeff_; // precomputed change of basis
};

} // namespace walg
