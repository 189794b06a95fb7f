#include "walg/acceptance.hpp"

#include "walg/a1_suite.hpp"
#include "walg/lattice_va.hpp"
#include "walg/quantization.hpp"
#include "walg/twisted_fock.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace walg {

namespace {

using Clock = std::chrono::steady_clock;

/// Sugawara-mode Virasoro action with the dual-pairing contractions folded
/// in: annihilation steps carry integer coefficients and touch only the
/// factors present, so a single-term application is a few dozen operations.
/// Results are cached per (m, term).
class FastVirasoro {
  public:
    explicit FastVirasoro(const VertexAlgebra &va) : va_(va) {
        int n = va.rank();
        Mat<Rational> g(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g[i][j] = Rational(va.root_system().gram()[i][j]);
        ginv_ = mat_inverse(g);
    }

    using Terms = std::map<StateKey, Rational>;

    const Terms &apply_term(int m, const StateKey &t) const {
        auto key = std::make_pair(m, t);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        Terms out;
        long wt = va_.term_weight(t);
        // unordered mode pairs {u, v} with u + v = m that can act
        std::set<long> us;
        for (auto &[d, i] : t.mono.factors) {
            us.insert(d);
            us.insert(m - d);
        }
        us.insert(0);
        us.insert((long)m);
        for (long u = m + 1; u < 0; ++u)
            us.insert(u); // both-creation splits
        std::set<std::pair<long, long>> pairs;
        for (long u : us) {
            long v = m - u;
            pairs.insert({std::min(u, v), std::max(u, v)});
        }
        for (auto &[u, v] : pairs) {
            Rational weight = (u == v) ? Rational(1, 2) : Rational(1);
            pair_action(u, v, t, weight, out);
        }
        (void)wt;
        auto [ins, ok] = cache_.emplace(std::move(key), std::move(out));
        (void)ok;
        return ins->second;
    }

    Terms apply(int m, const Terms &x) const {
        Terms out;
        for (auto &[t, c] : x)
            for (auto &[t2, c2] : apply_term(m, t)) {
                auto it = out.find(t2);
                if (it == out.end())
                    out.emplace(t2, c * c2);
                else {
                    it->second += c * c2;
                    if (it->second.is_zero())
                        out.erase(it);
                }
            }
        return out;
    }

    LatticeState to_state(const Terms &x) const {
        LatticeState s;
        for (auto &[t, c] : x)
            s.add_term(t, Cyclotomic(c));
        return s;
    }

  private:
    const VertexAlgebra &va_;
    Mat<Rational> ginv_;
    mutable std::map<std::pair<int, StateKey>, Terms> cache_;

    static void acc(Terms &out, StateKey &&t, const Rational &c) {
        if (c.is_zero())
            return;
        std::sort(t.mono.factors.begin(), t.mono.factors.end());
        auto it = out.find(t);
        if (it == out.end())
            out.emplace(std::move(t), c);
        else {
            it->second += c;
            if (it->second.is_zero())
                out.erase(it);
        }
    }

    // basis-vector mode e_b(u) applied to a term, times c
    void basis_mode(long u, int b, const StateKey &t, const Rational &c, Terms &out) const {
        int n = va_.rank();
        if (u < 0) {
            StateKey t2 = t;
            t2.mono.factors.emplace_back((int)-u, b);
            acc(out, std::move(t2), c);
        } else if (u == 0) {
            long p = 0;
            for (int j = 0; j < n; ++j)
                p += va_.root_system().gram()[b][j] * t.gamma[(size_t)j];
            if (p)
                acc(out, StateKey(t), c * Rational(p));
        } else {
            for (size_t f = 0; f < t.mono.factors.size(); ++f) {
                if (f > 0 && t.mono.factors[f] == t.mono.factors[f - 1])
                    continue;
                auto [d, i] = t.mono.factors[f];
                if (d != u)
                    continue;
                long mult = (long)std::count(t.mono.factors.begin(), t.mono.factors.end(),
                                             t.mono.factors[f]);
                long g = va_.root_system().gram()[b][i];
                if (!g)
                    continue;
                StateKey t2 = t;
                t2.mono.factors.erase(t2.mono.factors.begin() + (long)f);
                acc(out, std::move(t2), c * Rational(mult * u * g));
            }
        }
    }

    // (1/2) sum_{ij} Ginv_ij :e_i(u) e_j(v): on a term, u <= v, times weight
    void pair_action(long u, long v, const StateKey &t, const Rational &weight,
                     Terms &out) const {
        int n = va_.rank();
        if (v > 0) {
            // contraction with each matching factor collapses the dual sum
            for (size_t f = 0; f < t.mono.factors.size(); ++f) {
                if (f > 0 && t.mono.factors[f] == t.mono.factors[f - 1])
                    continue;
                auto [d, jf] = t.mono.factors[f];
                if (d != v)
                    continue;
                long mult = (long)std::count(t.mono.factors.begin(), t.mono.factors.end(),
                                             t.mono.factors[f]);
                StateKey t2 = t;
                t2.mono.factors.erase(t2.mono.factors.begin() + (long)f);
                basis_mode(u, jf, t2, weight * Rational(mult * v), out);
            }
        } else if (v == 0) {
            // gamma-vector mode at u (u <= 0 here)
            for (int i = 0; i < n; ++i) {
                long gi = t.gamma[(size_t)i];
                if (gi)
                    basis_mode(u, i, t, weight * Rational(gi), out);
            }
        } else {
            // both creations
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Rational c = ginv_[(size_t)i][(size_t)j] * weight;
                    if (c.is_zero())
                        continue;
                    StateKey t2 = t;
                    t2.mono.factors.emplace_back((int)-v, j);
                    t2.mono.factors.emplace_back((int)-u, i);
                    acc(out, std::move(t2), c);
                }
        }
    }
};

std::string fmt_seconds(double s) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << s << "s";
    return os.str();
}

bool criterion_membership(std::string &detail) {
    bool ok = true;
    std::ostringstream os;
    for (auto [t, n] : {std::pair<char, int>{'A', 2}, {'A', 3}, {'D', 4}}) {
        VertexAlgebra va(t, n);
        std::vector<std::pair<std::string, LatticeState>> elems;
        elems.emplace_back("omega", va.build_omega());
        for (int d = 1; d <= 3; ++d)
            elems.emplace_back("omega^" + std::to_string(d), va.build_omega_d(d));
        auto lam0 = va.default_lambda0();
        for (int d = 1; d <= 2; ++d)
            elems.emplace_back("nu^" + std::to_string(d), va.build_nu_d(lam0, d));
        if (t == 'D')
            elems.emplace_back("pi^4", va.build_pi_n());
        for (auto &[name, st] : elems) {
            bool member = va.in_w_algebra(st);
            if (!member) {
                ok = false;
                os << va.root_system().name() << ":" << name << " not in kernel; ";
            }
        }
        va.clear_memo();
    }
    detail = os.str();
    return ok;
}

bool criterion_virasoro_vq(std::string &detail) {
    std::ostringstream os;
    bool ok = true;
    for (auto [t, n] : {std::pair<char, int>{'A', 2}, {'D', 4}}) {
        VertexAlgebra va(t, n, 14);
        FastVirasoro fast(va);
        auto omega = va.build_omega();
        auto basis = va.weight_basis(5);

        // validate the mode-sum route against the n-th product route
        std::mt19937 rng(97);
        std::uniform_int_distribution<size_t> pick(0, basis.size() - 1);
        for (int trial = 0; trial < 25; ++trial) {
            const StateKey &key = basis[pick(rng)];
            LatticeState x;
            x.add_term(key, Cyclotomic::one());
            FastVirasoro::Terms tx{{key, Rational(1)}};
            for (int m : {-2, 0, 1, 3})
                if (!(fast.to_state(fast.apply(m, tx)) == va.nth_product(omega, x, m + 1))) {
                    detail = "mode-sum route disagrees with the n-th product route";
                    return false;
                }
        }
        va.clear_memo();

        long central = n;
        for (const auto &key : basis) {
            FastVirasoro::Terms x{{key, Rational(1)}};
            std::map<int, FastVirasoro::Terms> first;
            for (int m = -3; m <= 3; ++m)
                first[m] = fast.apply(m, x);
            for (int m = -3; m <= 3; ++m)
                for (int nn = -3; nn < m; ++nn) {
                    FastVirasoro::Terms lhs = fast.apply(m, first[nn]);
                    for (auto &[t2, c2] : fast.apply(nn, first[m])) {
                        auto it = lhs.find(t2);
                        if (it == lhs.end())
                            lhs.emplace(t2, -c2);
                        else {
                            it->second -= c2;
                            if (it->second.is_zero())
                                lhs.erase(it);
                        }
                    }
                    FastVirasoro::Terms rhs;
                    for (auto &[t2, c2] : fast.apply(m + nn, x))
                        rhs.emplace(t2, c2 * Rational(m - nn));
                    if (m + nn == 0) {
                        long c = ((long)m * m * m - m) * central;
                        if (c) {
                            auto it = rhs.find(key);
                            Rational add = Rational(c, 12);
                            if (it == rhs.end())
                                rhs.emplace(key, add);
                            else {
                                it->second += add;
                                if (it->second.is_zero())
                                    rhs.erase(it);
                            }
                        }
                    }
                    if (!(lhs == rhs)) {
                        ok = false;
                        os << va.root_system().name() << " fails at (m,n)=(" << m << ","
                           << nn << "); ";
                    }
                }
        }
    }
    detail = os.str();
    return ok;
}

bool criterion_borcherds(std::string &detail) {
    long checked = 0;
    std::mt19937 rng(613);
    for (auto [t, n] : {std::pair<char, int>{'A', 1}, {'A', 2}}) {
        VertexAlgebra va(t, n, 14);
        std::uniform_int_distribution<int> mode(-2, 2);
        std::uniform_int_distribution<int> which(0, 4);
        std::uniform_int_distribution<int> idx(0, n - 1);
        auto random_state = [&]() {
            LatticeState s;
            switch (which(rng)) {
            case 0:
                return va.vacuum();
            case 1: {
                FockMonomial m;
                m.factors = {{1, idx(rng)}};
                s.add_term(StateKey{m, IVec((size_t)n, 0)}, Cyclotomic::one());
                return s;
            }
            case 2: {
                FockMonomial m;
                m.factors = {{1, idx(rng)}, {2, idx(rng)}};
                std::sort(m.factors.begin(), m.factors.end());
                s.add_term(StateKey{m, IVec((size_t)n, 0)}, Cyclotomic::one());
                return s;
            }
            case 3: {
                IVec g((size_t)n, 0);
                g[(size_t)idx(rng)] = 1;
                return LatticeState::lattice_point(g);
            }
            default: {
                // a root times -1 with a depth-1 factor on top
                IVec g((size_t)n, 0);
                g[(size_t)idx(rng)] = -1;
                FockMonomial m;
                m.factors = {{1, idx(rng)}};
                s.add_term(StateKey{m, g}, Cyclotomic(2l));
                return s;
            }
            }
        };
        for (int trial = 0; trial < 100; ++trial) {
            auto a = random_state(), b = random_state(), c = random_state();
            if (!va.borcherds_check(a, b, c, mode(rng), mode(rng), mode(rng))) {
                detail = "identity fails on a randomized instance";
                return false;
            }
            ++checked;
        }
        va.clear_memo();
    }
    detail = std::to_string(checked) + " randomized instances";
    return true;
}

bool criterion_twisted_product(std::string &detail) {
    long checked = 0;
    for (auto [t, n] : {std::pair<char, int>{'A', 1}, {'A', 2}}) {
        VertexAlgebra va(t, n);
        TwistedModule tm(va);
        std::vector<PolyVec> vecs{PolyVec::one(),
                                  PolyVec::monomial(MultiIndex{{VarId{0, 0}, 1}})};
        vecs.push_back(PolyVec::monomial(
            mi_mul(MultiIndex{{VarId{0, 0}, 1}}, MultiIndex{{VarId{n - 1, 1}, 1}})));
        for (int ja = 0; ja < n; ++ja)
            for (int jb = 0; jb < n; ++jb)
                for (int k = 0; k <= 2; ++k)
                    for (const auto &c : vecs) {
                        if (!tm.twisted_product_check(ja, jb, k, c, Rational(3))) {
                            detail = "product formula fails for generators";
                            return false;
                        }
                        ++checked;
                    }
    }
    detail = std::to_string(checked) + " generator/vector/k combinations";
    return true;
}

bool criterion_propagator(std::string &detail) {
    // rank-one closed-form value
    {
        VertexAlgebra va('A', 1);
        TwistedModule tm(va);
        std::vector<Cyclotomic> beta{sqrt_rational(Rational(2))};
        if (!(tm.propagator_coeff(beta, beta, 0) == Cyclotomic(Rational(1, 4)))) {
            detail = "A_1 P^0 != lambda^{-2}/4";
            return false;
        }
    }
    // xi^{-1} cancellation and closed form against the series oracle
    for (auto [t, n] : {std::pair<char, int>{'A', 2}, {'A', 3}}) {
        VertexAlgebra va(t, n);
        TwistedModule tm(va);
        for (int a = 0; a < n; ++a) {
            int b = tm.frame().partner(a);
            Rational p = Rational(1) - tm.p_of(a);
            // oracle: expansion of (1+x)^{-p} (xi^{-2} + p lambda^{-1} xi^{-1})
            if (!(gen_binomial(-p, 1) + p == Rational(0))) {
                detail = "xi^{-1} coefficient survives";
                return false;
            }
            for (int k = 0; k <= 4; ++k) {
                Rational oracle = gen_binomial(-p, (unsigned long)k + 2) +
                                  p * gen_binomial(-p, (unsigned long)k + 1);
                if (!(tm.propagator_coeff(a, b, k) == Cyclotomic(oracle))) {
                    detail = "closed form disagrees with the series oracle";
                    return false;
                }
            }
            // mode-bracket route: [annihilation part, creation part] on 1
            PolyVec one = PolyVec::one();
            Rational lo(-7), hi(7);
            std::map<std::pair<Rational, Rational>, Cyclotomic> comm;
            for (auto &[s2, v2] : tm.apply_generator(b, one, lo, hi))
                for (auto &[s1, v1] : tm.apply_generator(a, v2, lo, hi))
                    for (auto &[pk, pc] : v1.terms())
                        if (pk.mono.empty())
                            comm[{s1, s2}] += pc;
            for (auto &[key, cval] : comm) {
                Rational kk = key.second - p + Rational(1);
                bool expected = kk.is_integer() && kk >= Rational(0) &&
                                key.first == -p - kk - Rational(1);
                Cyclotomic want = expected ? Cyclotomic(p + kk) : Cyclotomic::zero();
                if (!(cval == want)) {
                    detail = "mode contraction disagrees with the propagator series";
                    return false;
                }
            }
        }
    }
    detail = "closed form, series oracle and mode route agree";
    return true;
}

bool criterion_c_coeffs(std::string &detail) {
    for (auto [t, n] : {std::pair<char, int>{'A', 2}, {'A', 3}}) {
        VertexAlgebra va(t, n);
        TwistedModule tm(va);
        const auto &cox = va.coxeter_element();
        for (const auto &alpha : va.root_system().roots()) {
            if (!(tm.c_coeff(alpha, 0) == Cyclotomic::one())) {
                detail = "c_0 != 1";
                return false;
            }
            IVec ma(alpha.size());
            for (size_t i = 0; i < alpha.size(); ++i)
                ma[i] = -alpha[i];
            IVec sa = cox.apply(alpha);
            for (int k = 1; k <= 4; ++k) {
                Cyclotomic ck = tm.c_coeff(alpha, k);
                if (!(ck == tm.c_coeff(ma, k)) || !(ck == tm.c_coeff(sa, k))) {
                    detail = "c_k symmetry fails";
                    return false;
                }
            }
        }
    }
    // operator identity for A_2, d = 1, 2
    VertexAlgebra va('A', 2);
    TwistedModule tm(va);
    LaurentWindow w{Rational(-4), Rational(4)};
    int kmax = 7, kcmp = 4;
    auto clip = [&](const NormalOrderedOperator &op) {
        NormalOrderedOperator r;
        for (auto &[k, c] : op.terms())
            if (mi_max_mode(k.q) <= kcmp && mi_max_mode(k.dq) <= kcmp)
                r.add_term(k, c);
        return r;
    };
    IVec alpha = va.root_system().roots()[0];
    IVec malpha(alpha.size());
    for (size_t i = 0; i < alpha.size(); ++i)
        malpha[i] = -alpha[i];
    for (int d = 1; d <= 2; ++d) {
        LatticeState st = va.e_mode(alpha, -d, LatticeState::lattice_point(malpha));
        if (!(clip(tm.twisted_field(st, w, kmax)) == clip(tm.e_pair_field(alpha, d, w, kmax)))) {
            detail = "series form disagrees with the twisted field at d=" + std::to_string(d);
            return false;
        }
    }
    detail = "c_0 = 1, symmetries, and the operator identity for d = 1, 2";
    return true;
}

bool criterion_a1_table(std::string &detail) {
    VertexAlgebra va('A', 1);
    TwistedModule tm(va);
    LaurentWindow w{Rational(-8), Rational(8)};
    int kmax = 9, kcmp = 6;
    NormalOrderedOperator x = tm.twisted_field(va.build_omega(), w, kmax);
    if (!x.lambda_powers_integral()) {
        detail = "fractional lambda powers for a sigma-invariant element";
        return false;
    }
    auto truncate_modes = [&](const NormalOrderedOperator &op) {
        NormalOrderedOperator r;
        for (auto &[k, c] : op.terms())
            if (mi_max_mode(k.q) <= kcmp && mi_max_mode(k.dq) <= kcmp)
                r.add_term(k, c);
        return r;
    };
    auto qv = [](int k, int e = 1) { return MultiIndex{{VarId{0, k}, e}}; };

    NormalOrderedOperator lm1;
    lm1.add_term({qv(0, 2), {}, Rational(0)}, Cyclotomic(Rational(1, 2)));
    for (int k = 0; k + 1 <= kcmp; ++k)
        lm1.add_term({qv(k + 1), qv(k), Rational(0)}, Cyclotomic::one());

    NormalOrderedOperator l0;
    l0.add_term({{}, {}, Rational(0)}, Cyclotomic(Rational(1, 16)));
    for (int k = 0; k <= kcmp; ++k)
        l0.add_term({qv(k), qv(k), Rational(0)}, Cyclotomic(Rational(2 * k + 1, 2)));

    NormalOrderedOperator l1;
    l1.add_term({{}, qv(0, 2), Rational(0)}, Cyclotomic(Rational(1, 8)));
    for (int k = 0; k + 1 <= kcmp; ++k)
        l1.add_term({qv(k), qv(k + 1), Rational(0)},
                    Cyclotomic(Rational((2 * k + 3) * (2 * k + 1), 4)));

    NormalOrderedOperator l2;
    l2.add_term({{}, mi_mul(qv(0), qv(1)), Rational(0)}, Cyclotomic(Rational(3, 8)));
    for (int k = 0; k + 2 <= kcmp; ++k)
        l2.add_term({qv(k), qv(k + 2), Rational(0)},
                    Cyclotomic(Rational((2 * k + 5) * (2 * k + 3) * (2 * k + 1), 8)));

    std::vector<std::pair<int, NormalOrderedOperator>> table{
        {-1, lm1}, {0, l0}, {1, l1}, {2, l2}};
    for (auto &[m, expect] : table)
        if (!(truncate_modes(x.lambda_coefficient(Rational(-m - 2))) == expect)) {
            detail = "pipeline operator differs from the closed table at m=" +
                     std::to_string(m);
            return false;
        }
    detail = "L_{-1}, L_0, L_1, L_2 match coefficientwise";
    return true;
}

bool criterion_annihilation(std::string &detail) {
    auto table = dvv_oracle(3, 12);
    auto plain = check_annihilation(table, -1, 5, 3, 12);
    if (!plain.all_zero) {
        detail = "nonzero residual in the plain run";
        return false;
    }
    long checked = plain.checked;
    for (Rational delta : {Rational(2), Rational(1, 3)}) {
        auto r = check_annihilation(table, -1, 5, 3, 12, delta);
        if (!r.all_zero) {
            detail = "nonzero residual after rescaling";
            return false;
        }
        checked += r.checked;
    }
    detail = std::to_string(checked) + " frontier-safe coefficients, all zero";
    return true;
}

bool criterion_quantization(std::string &detail) {
    // Darboux commutators, k,l <= 4
    std::vector<LoopVector> basis;
    for (int k = 0; k <= 4; ++k) {
        LoopVector q, p;
        q.plus[{k, 0}] = Rational(1);
        p.minus[{k, 0}] = Rational(1);
        basis.push_back(q);
        basis.push_back(p);
    }
    for (const auto &f1 : basis)
        for (const auto &f2 : basis) {
            auto a = quantize_linear(f1), b = quantize_linear(f2);
            NormalOrderedOperator br = a.compose(b) - b.compose(a);
            NormalOrderedOperator expect;
            expect.add_term({{}, {}, Rational(0)}, Cyclotomic(omega_pairing(f1, f2)));
            if (!(br == expect)) {
                detail = "commutator law fails on a Darboux pair";
                return false;
            }
        }
    // S round trip at t = 1/2 on a degree-<=4 truncation of the tau data
    LoopSpace ls({{Rational(1)}}, {Rational(1)});
    std::vector<Mat<Rational>> mats;
    Rational c(1), t(1, 2);
    for (int k = 1; k <= 8; ++k) {
        c *= t / Rational(k);
        mats.push_back({{c}});
    }
    SymplecticSeries s(SymplecticSeries::Kind::S, ls, mats);
    auto table = dvv_oracle(2, 4);
    TameSeries f = wk_tau(table, 2, 4);
    auto g = s_hat_apply(s, f);
    auto back = s_hat_apply(s.inverse(), g);
    if (!(back == f)) {
        detail = "calibration round trip is not the identity";
        return false;
    }
    detail = "commutator law and S round trip hold";
    return true;
}

bool criterion_mutation(std::string &detail) {
    // every stored correlator in a small truncation must be load-bearing
    long tested = 0;
    {
        long gmax = 2, wmax = 5;
        std::vector<std::pair<long, std::vector<int>>> entries;
        for (long g = 0; g <= gmax; ++g)
            for (long w = 0; w <= wmax; ++w) {
                long n = w - 3 * g + 3;
                if (n < 1 || (g == 0 && n < 3))
                    continue;
                std::vector<int> ks;
                std::function<void(long, long, int)> rec = [&](long left, long slots,
                                                               int minv) {
                    if (slots == 0) {
                        if (left == 0)
                            entries.emplace_back(g, ks);
                        return;
                    }
                    for (int v = minv; v <= left; ++v) {
                        ks.push_back(v);
                        rec(left - v, slots - 1, v);
                        ks.pop_back();
                    }
                };
                rec(w, n, 0);
            }
        for (auto &[g, ks] : entries) {
            auto clean = dvv_oracle(gmax, wmax);
            Rational original = clean.get(g, ks);
            if (original.is_zero())
                continue;
            auto corrupted = dvv_oracle(gmax, wmax);
            corrupted.corrupt(g, ks, original + Rational(1, 97));
            auto report = check_annihilation(corrupted, -1, 3, gmax, wmax);
            if (report.all_zero) {
                std::ostringstream os;
                os << "corrupting <g=" << g << ", ks=";
                for (int k : ks)
                    os << k << " ";
                os << "> goes undetected";
                detail = os.str();
                return false;
            }
            ++tested;
        }
    }
    // every c_k coefficient in the series identity must be load-bearing
    {
        VertexAlgebra va('A', 2);
        TwistedModule tm(va);
        LaurentWindow w{Rational(-4), Rational(4)};
        int kmax = 7, kcmp = 4;
        auto clip = [&](const NormalOrderedOperator &op) {
            NormalOrderedOperator r;
            for (auto &[k, c] : op.terms())
                if (mi_max_mode(k.q) <= kcmp && mi_max_mode(k.dq) <= kcmp)
                    r.add_term(k, c);
            return r;
        };
        IVec alpha = va.root_system().roots()[0];
        IVec malpha(alpha.size());
        for (size_t i = 0; i < alpha.size(); ++i)
            malpha[i] = -alpha[i];
        for (int d = 2; d <= 3; ++d) {
            LatticeState st = va.e_mode(alpha, -d, LatticeState::lattice_point(malpha));
            NormalOrderedOperator lhs = clip(tm.twisted_field(st, w, kmax));
            long top = 2 - 1 + d;
            for (long kmut = 1; kmut <= top; ++kmut) {
                // rebuild the series side with c_kmut shifted by 1/53
                NormalOrderedOperator sum;
                std::vector<Cyclotomic> aframe = tm.frame().frame_coordinates([&] {
                    std::vector<Cyclotomic> v((size_t)2);
                    for (int i = 0; i < 2; ++i)
                        v[(size_t)i] = Cyclotomic(alpha[(size_t)i]);
                    return v;
                }());
                for (long k = 0; k <= top; ++k) {
                    Cyclotomic ck = tm.c_coeff(alpha, (int)k);
                    if (k == kmut)
                        ck += Cyclotomic(Rational(1, 53));
                    if (ck.is_zero())
                        continue;
                    sum += tm.schur_field(aframe, (int)(top - k), w, kmax)
                               .shift_lambda(Rational(-k), ck);
                }
                sum = sum * Cyclotomic(-1l); // (-1)^{|a|^2(|a|^2+1)/2} with |a|^2 = 2
                if (clip(sum) == lhs) {
                    detail = "corrupting c_" + std::to_string(kmut) + " goes undetected";
                    return false;
                }
                ++tested;
            }
        }
    }
    detail = std::to_string(tested) + " single-coefficient corruptions, all detected";
    return true;
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream &out) {
    std::vector<std::pair<std::string, std::function<bool(std::string &)>>> criteria{
        {"W-membership table (A2, A3, D4)", criterion_membership},
        {"Virasoro bracket on V_Q, weight <= 5 (A2, D4)", criterion_virasoro_vq},
        {"Borcherds identity, randomized (A1, A2)", criterion_borcherds},
        {"twisted product formula, k <= 2 (A1, A2)", criterion_twisted_product},
        {"propagator cross-checks (A1, A2, A3)", criterion_propagator},
        {"c_k suite and pair-field identity (A2, A3)", criterion_c_coeffs},
        {"A1 pipeline matches the closed Virasoro table", criterion_a1_table},
        {"Virasoro annihilation of the truncated tau function", criterion_annihilation},
        {"quantization laws (commutators, S round trip)", criterion_quantization},
        {"mutation sensitivity", criterion_mutation},
    };
    std::vector<CriterionResult> results;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto start = Clock::now();
        std::string detail;
        bool passed = false;
        try {
            passed = criteria[i].second(detail);
        } catch (const std::exception &e) {
            passed = false;
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        results.push_back(
            {(int)i + 1, criteria[i].first, passed, secs, detail});
        out << "[" << (passed ? "PASS" : "FAIL") << "] criterion " << i + 1 << ": "
            << criteria[i].first << " (" << fmt_seconds(secs) << ")";
        if (!detail.empty())
            out << " -- " << detail;
        out << std::endl;
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult> &results) {
    for (const auto &r : results)
        if (!r.passed)
            return false;
    return true;
}

} // namespace walg
