#pragma once

#include "walg/quantization.hpp"
#include "walg/twisted_fock.hpp"

#include <optional>

namespace walg {

struct InsufficientTable : std::runtime_error {
    InsufficientTable() : std::runtime_error("correlator table does not cover the truncation") {}
};

/// Period data I^{(k)}_beta(t, lambda) of the rank-one singularity:
/// a single monomial  coeff * (lambda - t)^expo  with sqrt(2) in the field.
struct A1Period {
    int k;
    Rational t;
    Cyclotomic coeff;
    Rational expo;
};
A1Period a1_period(int k, const Rational &t);

/// Intersection numbers <tau_{k_1}...tau_{k_n}>_g, generated by string,
/// dilaton and the DVV recursion on correlator arrays; completely
/// independent of the operator pipeline.
class CorrelatorTable {
  public:
    CorrelatorTable(long genus_max, long weight_max)
        : genus_max_(genus_max), weight_max_(weight_max) {}

    long genus_max() const { return genus_max_; }
    long weight_max() const { return weight_max_; }

    /// <tau_{ks}>_g; ks need not be sorted
    Rational get(long g, std::vector<int> ks) const;

    /// overwrite a single entry (mutation testing hook)
    void corrupt(long g, std::vector<int> ks, const Rational &value);

  private:
    long genus_max_;
    long weight_max_;
    mutable std::map<std::pair<long, std::vector<int>>, Rational> memo_;
    std::map<std::pair<long, std::vector<int>>, Rational> overrides_;

    Rational compute(long g, const std::vector<int> &ks) const;
};

CorrelatorTable dvv_oracle(long genus_max, long weight_max);

/// Truncated Witten-Kontsevich tau-function in shifted variables:
/// F^{(g)} = sum (1/prod mult_k!) <prod tau_k>_g prod s_k
TameSeries wk_tau(const CorrelatorTable &table, long genus_max, long degree_max);

/// L_m built through the twisted Wick pipeline (never hand-coded).
struct VirasoroOperator {
    int m;
    Rational t;
    NormalOrderedOperator op;
};
VirasoroOperator a1_virasoro(int m, const Rational &t, int kmax);

struct Residual {
    int m;
    long genus;
    MultiIndex mono;
    Cyclotomic value;
};

struct AnnihilationReport {
    bool all_zero = true;
    long checked = 0;
    std::vector<Residual> residuals;
};

/// Applies each pipeline L_m to the truncated tau-function and asserts every
/// frontier-safe coefficient of the conjugated residual vanishes. rescale
/// multiplies (hbar, q) by (Delta, sqrt(Delta)).
AnnihilationReport check_annihilation(const CorrelatorTable &table, int m_lo, int m_hi,
                                      long genus_max, long degree_max,
                                      std::optional<Rational> rescale = std::nullopt);

} // namespace walg
