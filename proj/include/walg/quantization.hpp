#pragma once

#include "walg/twisted_fock.hpp"

#include <map>
#include <vector>

namespace walg {

struct NotInfinitesimallySymplectic : std::domain_error {
    NotInfinitesimallySymplectic()
        : std::domain_error("operator is not infinitesimally symplectic") {}
};
struct NotTame : std::domain_error {
    NotTame() : std::domain_error("series violates the tame bound") {}
};
struct NotSymplectic : std::domain_error {
    NotSymplectic() : std::domain_error("series violates the symplectic condition") {}
};

/// The loop space H((z^{-1})) for a rank-n space H with pairing eta,
/// together with the distinguished unit (dilaton) vector.
class LoopSpace {
  public:
    LoopSpace(Mat<Rational> eta, std::vector<Rational> unit);

    int rank() const { return (int)eta_.size(); }
    const Mat<Rational> &eta() const { return eta_; }
    const Mat<Rational> &eta_inv() const { return eta_inv_; }
    const std::vector<Rational> &unit() const { return unit_; }

    Rational pair(const std::vector<Rational> &x, const std::vector<Rational> &y) const;

  private:
    Mat<Rational> eta_;
    Mat<Rational> eta_inv_;
    std::vector<Rational> unit_;
};

/// phi(z) = sum q_k^i(phi) d_i z^k + sum p_{k,i}(phi) d^i (-z)^{-k-1}
struct LoopVector {
    std::map<std::pair<int, int>, Rational> plus;  // (k, i) -> q_k^i
    std::map<std::pair<int, int>, Rational> minus; // (k, i) -> p_{k,i}
};

/// Omega(phi1, phi2) through the Darboux coordinates.
Rational omega_pairing(const LoopVector &a, const LoopVector &b);
/// Omega(phi1, phi2) = Res_z (phi1(-z), phi2(z)), computed from the residue.
Rational omega_pairing_residue(const LoopSpace &ls, const LoopVector &a, const LoopVector &b);

/// hat-phi per the linear quantization rule.
NormalOrderedOperator quantize_linear(const LoopVector &phi);

/// Quadratic Hamiltonian coefficients on the Darboux basis.
struct QuadHamiltonian {
    // symmetric data: pp[(K,L)] with K <= L, qq[(K,L)] with K <= L, pq[(K,L)]
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, Rational> pp, pq, qq;
};

/// the three quantization rules applied termwise
NormalOrderedOperator quantize_quadratic(const QuadHamiltonian &h);

/// h_A for a matrix Laurent polynomial A(z) = sum_s A_s z^s acting on the
/// loop space; checks infinitesimal symplecticity on the truncated basis.
QuadHamiltonian hamiltonian_of(const LoopSpace &ls, const std::map<int, Mat<Rational>> &a_s,
                               int kmax);

/// S-type (1 + S_1 z^{-1} + ...) or R-type (1 + R_1 z + ...) symplectic series.
class SymplecticSeries {
  public:
    enum class Kind { S, R };
    SymplecticSeries(Kind kind, const LoopSpace &ls, std::vector<Mat<Rational>> mats);

    Kind kind() const { return kind_; }
    int order() const { return (int)mats_.size(); }
    /// coefficient matrix of z^{-k} (S) or z^k (R); index 0 is the identity
    Mat<Rational> matrix(int k) const;
    SymplecticSeries inverse() const;

    const LoopSpace &space() const { return ls_; }

  private:
    Kind kind_;
    const LoopSpace &ls_;
    std::vector<Mat<Rational>> mats_;
};

/// W_{kl} from (tS(z)S(w) - 1)/(z^{-1} + w^{-1})
std::map<std::pair<int, int>, Mat<Rational>> w_coeffs(const SymplecticSeries &s);
/// V_{kl} from  sum (-1)^{k+l} V_{kl} z^k w^l = (tR(z)R(w) - 1)/(z + w)
std::map<std::pair<int, int>, Mat<Rational>> v_coeffs(const SymplecticSeries &r);

/// Truncated asymptotical function exp(sum hbar^{g-1} F^{(g)}(s)) in the
/// shifted variables s (dilaton shift absorbed into s_1).
class TameSeries {
  public:
    /// length_max caps the retained monomial length; the default covers
    /// dimension-constrained series where l(I) <= weight + 3
    TameSeries(int rank, long genus_max, long weight_max, long length_max = -1)
        : rank_(rank), genus_max_(genus_max), weight_max_(weight_max),
          length_max_(length_max < 0 ? weight_max + 3 * genus_max + 3 : length_max) {}

    int rank() const { return rank_; }
    long genus_max() const { return genus_max_; }
    long weight_max() const { return weight_max_; }
    long length_max() const { return length_max_; }

    static long weight(const MultiIndex &m) {
        long w = 0;
        for (auto &[v, e] : m)
            w += (long)v.k * e;
        return w;
    }
    static long length(const MultiIndex &m) {
        long l = 0;
        for (auto &[v, e] : m)
            l += e;
        return l;
    }

    void add(long g, const MultiIndex &m, const Cyclotomic &c) {
        if (c.is_zero() || g > genus_max_ || weight(m) > weight_max_ ||
            length(m) > length_max_)
            return;
        auto key = std::make_pair(g, m);
        auto it = coeff_.find(key);
        if (it == coeff_.end())
            coeff_.emplace(key, c);
        else {
            it->second += c;
            if (it->second.is_zero())
                coeff_.erase(it);
        }
    }
    const std::map<std::pair<long, MultiIndex>, Cyclotomic> &coeffs() const { return coeff_; }
    Cyclotomic coefficient(long g, const MultiIndex &m) const {
        auto it = coeff_.find({g, m});
        return it == coeff_.end() ? Cyclotomic::zero() : it->second;
    }
    bool operator==(const TameSeries &o) const { return coeff_ == o.coeff_; }

  private:
    int rank_;
    long genus_max_;
    long weight_max_;
    long length_max_;
    std::map<std::pair<long, MultiIndex>, Cyclotomic> coeff_;
};

bool is_tame(const TameSeries &f);

/// F |-> e^{W q^2 / 2 hbar} F((S q)_+), the hat-S^{-1} action of the
/// calibration on formal functions in the shifted variables.
TameSeries s_hat_apply(const SymplecticSeries &s, const TameSeries &f);

/// F |-> (e^{(hbar/2) V d^2} F)|_{q -> R^{-1} q} on tame series.
TameSeries r_hat_apply(const SymplecticSeries &r, const TameSeries &f);

} // namespace walg
