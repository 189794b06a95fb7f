#include "walg/quantization.hpp"

#include <algorithm>
#include <functional>

namespace walg {

namespace {

MultiIndex mi_single(VarId v, int e = 1) { return MultiIndex{{v, e}}; }

long mi_total(const MultiIndex &m) {
    long l = 0;
    for (auto &[v, e] : m)
        l += e;
    return l;
}

/// genus-graded polynomial data: (hbar power r = g-1, monomial) -> coeff
using GPoly = std::map<std::pair<long, MultiIndex>, Cyclotomic>;

void gp_add(GPoly &p, long r, const MultiIndex &m, const Cyclotomic &c) {
    if (c.is_zero())
        return;
    auto key = std::make_pair(r, m);
    auto it = p.find(key);
    if (it == p.end())
        p.emplace(key, c);
    else {
        it->second += c;
        if (it->second.is_zero())
            p.erase(it);
    }
}

MultiIndex mi_derive(const MultiIndex &m, VarId v, long &factor) {
    MultiIndex out;
    factor = 0;
    for (auto &[w, e] : m) {
        if (w == v) {
            factor = e;
            if (e > 1)
                out.emplace_back(w, e - 1);
        } else {
            out.push_back({w, e});
        }
    }
    return out;
}

} // namespace

LoopSpace::LoopSpace(Mat<Rational> eta, std::vector<Rational> unit)
    : eta_(std::move(eta)), unit_(std::move(unit)) {
    eta_inv_ = mat_inverse(eta_);
}

Rational LoopSpace::pair(const std::vector<Rational> &x, const std::vector<Rational> &y) const {
    Rational s(0);
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j)
            if (!x[i].is_zero() && !y[j].is_zero())
                s += x[i] * eta_[i][j] * y[j];
    return s;
}

Rational omega_pairing(const LoopVector &a, const LoopVector &b) {
    Rational s(0);
    for (auto &[k, p] : a.minus) {
        auto it = b.plus.find(k);
        if (it != b.plus.end())
            s += p * it->second;
    }
    for (auto &[k, q] : a.plus) {
        auto it = b.minus.find(k);
        if (it != b.minus.end())
            s -= q * it->second;
    }
    return s;
}

Rational omega_pairing_residue(const LoopSpace &ls, const LoopVector &a, const LoopVector &b) {
    // Res_z (a(-z), b(z)): only mixed terms at matching mode k hit z^{-1}
    (void)ls;
    Rational s(0);
    for (auto &[ka, pa] : a.minus)
        for (auto &[kb, qb] : b.plus)
            if (ka == kb)
                s += pa * qb;
    for (auto &[ka, qa] : a.plus)
        for (auto &[kb, pb] : b.minus)
            if (ka == kb)
                s -= qa * pb;
    return s;
}

NormalOrderedOperator quantize_linear(const LoopVector &phi) {
    NormalOrderedOperator op;
    for (auto &[ki, q] : phi.plus)
        op.add_term({{}, mi_single(VarId{ki.second, ki.first}), Rational(0)}, Cyclotomic(-q));
    for (auto &[ki, p] : phi.minus)
        op.add_term({mi_single(VarId{ki.second, ki.first}), {}, Rational(0)}, Cyclotomic(p));
    return op;
}

NormalOrderedOperator quantize_quadratic(const QuadHamiltonian &h) {
    NormalOrderedOperator op;
    for (auto &[kl, c] : h.pp) {
        auto [K, L] = kl;
        MultiIndex dq = mi_mul(mi_single(VarId{K.second, K.first}),
                               mi_single(VarId{L.second, L.first}));
        op.add_term({{}, dq, Rational(0)}, Cyclotomic(c));
    }
    for (auto &[kl, c] : h.pq) {
        auto [K, L] = kl; // p_K q_L -> q_L d/dq_K
        op.add_term({mi_single(VarId{L.second, L.first}), mi_single(VarId{K.second, K.first}),
                     Rational(0)},
                    Cyclotomic(c));
    }
    for (auto &[kl, c] : h.qq) {
        auto [K, L] = kl;
        MultiIndex q = mi_mul(mi_single(VarId{K.second, K.first}),
                              mi_single(VarId{L.second, L.first}));
        op.add_term({q, {}, Rational(0)}, Cyclotomic(c));
    }
    return op;
}

namespace {

/// contributions of an h-vector (coeffs over the d_i basis) at z power m
void decompose(const LoopSpace &ls, const std::vector<Rational> &coeffs, int m,
               LoopVector &out, const Rational &scale) {
    int n = ls.rank();
    if (m >= 0) {
        for (int i = 0; i < n; ++i)
            if (!coeffs[(size_t)i].is_zero())
                out.plus[{m, i}] += scale * coeffs[(size_t)i];
    } else {
        int k = -m - 1;
        // d_a z^m = (-1)^{k+1} sum_b eta_{ab} d^b (-z)^{-k-1}
        Rational sgn((k + 1) % 2 == 0 ? 1 : -1);
        for (int a = 0; a < n; ++a) {
            if (coeffs[(size_t)a].is_zero())
                continue;
            for (int b = 0; b < n; ++b) {
                Rational c = coeffs[(size_t)a] * ls.eta()[(size_t)a][(size_t)b];
                if (!c.is_zero())
                    out.minus[{k, b}] += scale * sgn * c;
            }
        }
    }
}

LoopVector apply_a(const LoopSpace &ls, const std::map<int, Mat<Rational>> &a_s,
                   bool from_plus, int l, int j) {
    int n = ls.rank();
    LoopVector out;
    for (auto &[s, mat] : a_s) {
        std::vector<Rational> img((size_t)n, Rational(0));
        if (from_plus) {
            for (int a = 0; a < n; ++a)
                img[(size_t)a] = mat[(size_t)a][(size_t)j];
            decompose(ls, img, l + s, out, Rational(1));
        } else {
            // A_s d^j (-z)^{-l-1} z^s with d^j = sum_a (eta^{-1})_{aj} d_a
            for (int a = 0; a < n; ++a) {
                Rational c(0);
                for (int b = 0; b < n; ++b)
                    c += mat[(size_t)a][(size_t)b] * ls.eta_inv()[(size_t)b][(size_t)j];
                img[(size_t)a] = c;
            }
            Rational sgn((l + 1) % 2 == 0 ? 1 : -1);
            decompose(ls, img, s - l - 1, out, sgn);
        }
    }
    return out;
}

} // namespace

QuadHamiltonian hamiltonian_of(const LoopSpace &ls, const std::map<int, Mat<Rational>> &a_s,
                               int kmax) {
    int n = ls.rank();
    struct B {
        bool is_q;
        int k, i;
    };
    std::vector<B> basis;
    for (int k = 0; k <= kmax; ++k)
        for (int i = 0; i < n; ++i) {
            basis.push_back({true, k, i});
            basis.push_back({false, k, i});
        }
    auto unit_vec = [&](const B &b) {
        LoopVector v;
        if (b.is_q)
            v.plus[{b.k, b.i}] = Rational(1);
        else
            v.minus[{b.k, b.i}] = Rational(1);
        return v;
    };
    auto a_image = [&](const B &b) { return apply_a(ls, a_s, b.is_q, b.k, b.i); };

    for (const auto &u : basis)
        for (const auto &v : basis) {
            Rational s = omega_pairing(a_image(u), unit_vec(v)) +
                         omega_pairing(unit_vec(u), a_image(v));
            if (!s.is_zero())
                throw NotInfinitesimallySymplectic();
        }

    QuadHamiltonian h;
    auto add = [&](const B &u, const B &v, const Rational &c) {
        if (c.is_zero())
            return;
        auto K = std::make_pair(u.k, u.i), L = std::make_pair(v.k, v.i);
        if (u.is_q && v.is_q) {
            auto key = std::minmax(K, L);
            h.qq[{key.first, key.second}] += c;
        } else if (!u.is_q && !v.is_q) {
            auto key = std::minmax(K, L);
            h.pp[{key.first, key.second}] += c;
        } else if (!u.is_q && v.is_q) {
            h.pq[{K, L}] += c;
        } else {
            h.pq[{L, K}] += c;
        }
    };
    for (size_t iu = 0; iu < basis.size(); ++iu)
        for (size_t iv = iu; iv < basis.size(); ++iv) {
            const auto &u = basis[iu];
            const auto &v = basis[iv];
            Rational c;
            if (iu == iv)
                c = omega_pairing(a_image(u), unit_vec(u)) * Rational(1, 2);
            else
                c = (omega_pairing(a_image(u), unit_vec(v)) +
                     omega_pairing(a_image(v), unit_vec(u))) *
                    Rational(1, 2);
            add(u, v, c);
        }
    for (auto m : {&h.pp, &h.pq, &h.qq})
        for (auto it = m->begin(); it != m->end();)
            it = it->second.is_zero() ? m->erase(it) : std::next(it);
    return h;
}

SymplecticSeries::SymplecticSeries(Kind kind, const LoopSpace &ls,
                                   std::vector<Mat<Rational>> mats)
    : kind_(kind), ls_(ls), mats_(std::move(mats)) {
    int n = ls_.rank();
    auto adj = [&](const Mat<Rational> &m) {
        Mat<Rational> t((size_t)n, std::vector<Rational>((size_t)n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                t[(size_t)i][(size_t)j] = m[(size_t)j][(size_t)i];
        return mat_mul(mat_mul(ls_.eta_inv(), t), ls_.eta());
    };
    // sum_{k+l=m} (-1)^k adj(M_k) M_l = 0 for m >= 1 (within the stored order)
    for (int m = 1; m <= (int)mats_.size(); ++m) {
        Mat<Rational> acc((size_t)n, std::vector<Rational>((size_t)n, Rational(0)));
        for (int k = 0; k <= m; ++k) {
            Mat<Rational> prod = mat_mul(adj(matrix(k)), matrix(m - k));
            Rational sgn(k % 2 == 0 ? 1 : -1);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    acc[(size_t)i][(size_t)j] += sgn * prod[(size_t)i][(size_t)j];
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!acc[(size_t)i][(size_t)j].is_zero())
                    throw NotSymplectic();
    }
}

Mat<Rational> SymplecticSeries::matrix(int k) const {
    int n = ls_.rank();
    if (k == 0)
        return mat_identity<Rational>((size_t)n);
    if (k <= (int)mats_.size())
        return mats_[(size_t)k - 1];
    return Mat<Rational>((size_t)n, std::vector<Rational>((size_t)n, Rational(0)));
}

SymplecticSeries SymplecticSeries::inverse() const {
    int n = ls_.rank();
    int ord = order();
    std::vector<Mat<Rational>> inv(
        (size_t)ord, Mat<Rational>((size_t)n, std::vector<Rational>((size_t)n, Rational(0))));
    // inv_k = -(M_k + sum_{j=1}^{k-1} M_j inv_{k-j})
    for (int k = 1; k <= ord; ++k) {
        Mat<Rational> acc = matrix(k);
        for (int j = 1; j < k; ++j) {
            Mat<Rational> prod = mat_mul(matrix(j), inv[(size_t)(k - j - 1)]);
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l)
                    acc[(size_t)i][(size_t)l] += prod[(size_t)i][(size_t)l];
        }
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l)
                inv[(size_t)(k - 1)][(size_t)i][(size_t)l] = -acc[(size_t)i][(size_t)l];
    }
    return SymplecticSeries(kind_, ls_, std::move(inv));
}

namespace {

std::map<std::pair<int, int>, Mat<Rational>> divide_by_sum(const SymplecticSeries &s) {
    const auto &ls = s.space();
    int n = ls.rank();
    int ord = s.order();
    auto adj = [&](const Mat<Rational> &m) {
        Mat<Rational> t((size_t)n, std::vector<Rational>((size_t)n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                t[(size_t)i][(size_t)j] = m[(size_t)j][(size_t)i];
        return mat_mul(mat_mul(ls.eta_inv(), t), ls.eta());
    };
    auto nmat = [&](int a, int b) {
        Mat<Rational> m = mat_mul(adj(s.matrix(a)), s.matrix(b));
        if (a == 0 && b == 0)
            for (int i = 0; i < n; ++i)
                m[(size_t)i][(size_t)i] -= Rational(1);
        return m;
    };
    // N = (x + y) Q: Q_{ab} = N_{a+1,b} - Q_{a+1,b-1}
    std::map<std::pair<int, int>, Mat<Rational>> q;
    for (int b = 0; b <= ord - 1; ++b)
        for (int a = ord - 1 - b; a >= 0; --a) {
            Mat<Rational> m = nmat(a + 1, b);
            if (b > 0) {
                auto it = q.find({a + 1, b - 1});
                if (it != q.end())
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            m[(size_t)i][(size_t)j] -= it->second[(size_t)i][(size_t)j];
            }
            q[{a, b}] = std::move(m);
        }
    return q;
}

} // namespace

std::map<std::pair<int, int>, Mat<Rational>> w_coeffs(const SymplecticSeries &s) {
    if (s.kind() != SymplecticSeries::Kind::S)
        throw std::domain_error("w_coeffs needs an S-type series");
    return divide_by_sum(s);
}

std::map<std::pair<int, int>, Mat<Rational>> v_coeffs(const SymplecticSeries &r) {
    if (r.kind() != SymplecticSeries::Kind::R)
        throw std::domain_error("v_coeffs needs an R-type series");
    auto p = divide_by_sum(r);
    // V_{kl} = (-1)^{k+l} P_{kl}
    for (auto &[kl, m] : p)
        if ((kl.first + kl.second) % 2)
            for (auto &row : m)
                for (auto &x : row)
                    x = -x;
    return p;
}

bool is_tame(const TameSeries &f) {
    for (auto &[key, c] : f.coeffs()) {
        auto &[g, m] = key;
        if (g < 0)
            return false;
        if (3 * g - 3 + mi_total(m) < TameSeries::weight(m))
            return false;
    }
    return true;
}

namespace {

GPoly gp_mul(const GPoly &a, const GPoly &b, long rmax, long wmax) {
    GPoly out;
    for (auto &[ka, ca] : a)
        for (auto &[kb, cb] : b) {
            long r = ka.first + kb.first;
            if (r > rmax)
                continue;
            MultiIndex m = mi_mul(ka.second, kb.second);
            if (TameSeries::weight(m) > wmax)
                continue;
            gp_add(out, r, m, ca * cb);
        }
    return out;
}

} // namespace

TameSeries s_hat_apply(const SymplecticSeries &s, const TameSeries &f) {
    if (s.kind() != SymplecticSeries::Kind::S)
        throw std::domain_error("s_hat_apply needs an S-type series");
    const auto &ls = s.space();
    int n = ls.rank();
    long wmax = f.weight_max();
    int ord = s.order();

    // s'_k = sum_r S_r s_{k+r} - delta_{k,0} S_1 1  (shifted variables)
    auto substitute_var = [&](VarId v) {
        GPoly lin;
        for (int r = 0; r <= ord; ++r) {
            Mat<Rational> mat = s.matrix(r);
            for (int j = 0; j < n; ++j) {
                Rational c = mat[(size_t)v.j][(size_t)j];
                if (!c.is_zero())
                    gp_add(lin, 0, mi_single(VarId{j, v.k + r}), Cyclotomic(c));
            }
        }
        if (v.k == 0) {
            auto s1 = s.matrix(1);
            Rational c(0);
            for (int j = 0; j < n; ++j)
                c += s1[(size_t)v.j][(size_t)j] * ls.unit()[(size_t)j];
            gp_add(lin, 0, {}, Cyclotomic(-c));
        }
        return lin;
    };

    TameSeries out(n, f.genus_max(), wmax);
    for (auto &[key, c] : f.coeffs()) {
        auto &[g, m] = key;
        GPoly acc;
        gp_add(acc, 0, {}, c);
        for (auto &[v, e] : m) {
            GPoly lin = substitute_var(v);
            for (int t = 0; t < e; ++t)
                acc = gp_mul(acc, lin, 0, wmax);
        }
        for (auto &[k2, c2] : acc)
            out.add(g, k2.second, c2);
    }

    // F^{(0)} += (1/2) sum (W_{kl} q_l, q_k) with q = s - 1 delta_{k,1}
    auto w = w_coeffs(s);
    auto q_var = [&](int k) {
        std::vector<GPoly> comp((size_t)n);
        for (int i = 0; i < n; ++i) {
            gp_add(comp[(size_t)i], 0, mi_single(VarId{i, k}), Cyclotomic::one());
            if (k == 1)
                gp_add(comp[(size_t)i], 0, {}, Cyclotomic(-ls.unit()[(size_t)i]));
        }
        return comp;
    };
    for (auto &[kl, mat] : w) {
        auto [k, l] = kl;
        auto qk = q_var(k), ql = q_var(l);
        Mat<Rational> em = mat_mul(ls.eta(), mat);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rational c = em[(size_t)i][(size_t)j] * Rational(1, 2);
                if (c.is_zero())
                    continue;
                GPoly prod = gp_mul(qk[(size_t)i], ql[(size_t)j], 0, wmax);
                for (auto &[k2, c2] : prod)
                    out.add(0, k2.second, c2 * Cyclotomic(c));
            }
    }
    return out;
}

TameSeries r_hat_apply(const SymplecticSeries &r, const TameSeries &f) {
    if (r.kind() != SymplecticSeries::Kind::R)
        throw std::domain_error("r_hat_apply needs an R-type series");
    if (!is_tame(f))
        throw NotTame();
    const auto &ls = r.space();
    int n = ls.rank();
    long wmax = f.weight_max();
    long gmax = f.genus_max();
    long rmax = gmax - 1;

    GPoly phi;
    for (auto &[key, c] : f.coeffs())
        gp_add(phi, key.first - 1, key.second, c);

    long lmax = f.length_max();
    // per-slot order bound: the m-th application of V d^2 contributes to
    // hbar^{g-1} q^I only when m <= 3g - 3 + l(I), by the tame inequality
    long mcap = 3 * gmax + lmax + 2;
    long lwork = lmax + 2 * mcap;
    // the substitution lowers weights; tame monomials satisfy wt <= 3g-3+l,
    // so internal completeness needs this working weight
    long wwork = std::max(wmax, 3 * gmax + lmax);
    // far-negative hbar powers can re-enter the window through products with
    // positive-genus factors in the log expansion, but only boundedly deep
    long scap = 2 * gmax + lmax + 6;
    long rmin = -1 - scap * (std::max(rmax, 0l) + 1);

    auto v = v_coeffs(r);
    auto d1 = [&](const GPoly &x, VarId var) {
        GPoly out;
        for (auto &[key, c] : x) {
            long fct;
            MultiIndex m = mi_derive(key.second, var, fct);
            if (fct)
                gp_add(out, key.first, m, c * Cyclotomic(fct));
        }
        return out;
    };

    // conjugated second-order operator:
    // T(X) = (1/2) (d^i, V_{kl} d^j) hbar [dd X + dPhi dX + dX dPhi + (ddPhi + dPhi dPhi) X]
    auto t_apply = [&](const GPoly &x) {
        GPoly out;
        for (auto &[kl, mat] : v) {
            auto [k, l] = kl;
            Mat<Rational> cm = mat_mul(mat_mul(ls.eta_inv(), mat), ls.eta_inv());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Rational c = cm[(size_t)i][(size_t)j] * Rational(1, 2);
                    if (c.is_zero())
                        continue;
                    VarId vi{i, k}, vj{j, l};
                    GPoly bundle = d1(d1(x, vi), vj);
                    for (auto &[k2, c2] : gp_mul(d1(phi, vi), d1(x, vj), rmax, wwork))
                        gp_add(bundle, k2.first, k2.second, c2);
                    for (auto &[k2, c2] : gp_mul(d1(phi, vj), d1(x, vi), rmax, wwork))
                        gp_add(bundle, k2.first, k2.second, c2);
                    GPoly zfac = d1(d1(phi, vi), vj);
                    for (auto &[k2, c2] : gp_mul(d1(phi, vi), d1(phi, vj), rmax, wwork))
                        gp_add(zfac, k2.first, k2.second, c2);
                    for (auto &[k2, c2] : gp_mul(zfac, x, rmax, wwork))
                        gp_add(bundle, k2.first, k2.second, c2);
                    for (auto &[k2, c2] : bundle)
                        gp_add(out, k2.first + 1, k2.second, c2 * Cyclotomic(c));
                }
        }
        // prune outside the retainable window
        for (auto it = out.begin(); it != out.end();)
            it = (it->first.first > rmax || it->first.first < rmin ||
                  mi_total(it->first.second) > lwork)
                     ? out.erase(it)
                     : std::next(it);
        return out;
    };

    GPoly d_total, cur;
    gp_add(cur, 0, {}, Cyclotomic::one());
    Rational fact(1);
    for (long m = 1; m <= mcap && !cur.empty(); ++m) {
        cur = t_apply(cur);
        fact *= Rational(m);
        for (auto &[k2, c2] : cur)
            if (mi_total(k2.second) <= lmax)
                gp_add(d_total, k2.first, k2.second, c2 * Cyclotomic(fact.inv()));
    }

    GPoly g = phi;
    GPoly dpow = d_total;
    for (long s2 = 1; s2 <= scap; ++s2) {
        Rational c(s2 % 2 ? 1 : -1, s2);
        for (auto &[k2, c2] : dpow)
            gp_add(g, k2.first, k2.second, c2 * Cyclotomic(c));
        dpow = gp_mul(dpow, d_total, rmax, wwork);
        for (auto it = dpow.begin(); it != dpow.end();)
            it = (it->first.first < rmin || mi_total(it->first.second) > lmax)
                     ? dpow.erase(it)
                     : std::next(it);
        if (dpow.empty())
            break;
        if (s2 == scap)
            throw NotTame();
    }

    // substitution q -> R^{-1} q on the shifted variables: indices go down,
    // s'_k = sum_{r<=k} Rbar_r s_{k-r} - Rbar_{k-1} 1 + delta_{k,1} 1
    SymplecticSeries rinv = r.inverse();
    auto substitute_var = [&](VarId var) {
        GPoly lin;
        for (int rr = 0; rr <= var.k; ++rr) {
            Mat<Rational> mat = rinv.matrix(rr);
            for (int j = 0; j < n; ++j) {
                Rational c = mat[(size_t)var.j][(size_t)j];
                if (!c.is_zero())
                    gp_add(lin, 0, mi_single(VarId{j, var.k - rr}), Cyclotomic(c));
            }
        }
        if (var.k >= 2) {
            auto rk = rinv.matrix(var.k - 1);
            Rational c(0);
            for (int j = 0; j < n; ++j)
                c += rk[(size_t)var.j][(size_t)j] * ls.unit()[(size_t)j];
            gp_add(lin, 0, {}, Cyclotomic(-c));
        }
        return lin;
    };
    TameSeries out(n, gmax, wmax, lmax);
    for (auto &[key, c] : g) {
        GPoly acc;
        gp_add(acc, 0, {}, c);
        for (auto &[var, e] : key.second) {
            GPoly lin = substitute_var(var);
            for (int t = 0; t < e; ++t)
                acc = gp_mul(acc, lin, 0, wwork);
        }
        long genus = key.first + 1;
        if (genus < 0 || genus > gmax)
            continue;
        for (auto &[k2, c2] : acc)
            out.add(genus, k2.second, c2);
    }
    return out;
}

} // namespace walg
