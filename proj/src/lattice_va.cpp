#include "walg/lattice_va.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace walg {

namespace {

std::vector<Cyclotomic> to_cyc(const IVec &v) {
    std::vector<Cyclotomic> r(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        r[i] = Cyclotomic(v[i]);
    return r;
}

std::vector<Cyclotomic> to_cyc(const std::vector<Rational> &v) {
    std::vector<Cyclotomic> r(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        r[i] = Cyclotomic(v[i]);
    return r;
}

FockMonomial with_factor(const FockMonomial &m, int depth, int idx) {
    FockMonomial r = m;
    auto f = std::make_pair(depth, idx);
    r.factors.insert(std::upper_bound(r.factors.begin(), r.factors.end(), f), f);
    return r;
}

} // namespace

VertexAlgebra::VertexAlgebra(char type_letter, int rank, long weight_bound)
    : rs_(RootSystem::build(type_letter, rank)), cox_(coxeter(rs_)), seifert_(rs_, cox_),
      weight_bound_(weight_bound) {
    int n = rs_.rank();
    Mat<Rational> g(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g[i][j] = Rational(rs_.gram()[i][j]);
    gram_inv_ = mat_inverse(g);
}

long VertexAlgebra::term_weight(const StateKey &k) const {
    long w = k.mono.weight();
    long norm = rs_.pairing(k.gamma, k.gamma);
    return w + norm / 2;
}

long VertexAlgebra::state_weight(const LatticeState &s) const {
    long w = 0;
    for (auto &[k, c] : s.terms())
        w = std::max(w, term_weight(k));
    return w;
}

void VertexAlgebra::check_weight(const LatticeState &s) const {
    for (auto &[k, c] : s.terms())
        if (term_weight(k) > weight_bound_)
            throw TruncationExceeded();
}

LatticeState VertexAlgebra::heis_mode(const std::vector<Cyclotomic> &alpha, int m,
                                      const LatticeState &a) const {
    int n = rs_.rank();
    LatticeState out;
    auto pair_with_basis = [&](int i) {
        Cyclotomic s;
        for (int j = 0; j < n; ++j)
            if (!alpha[(size_t)j].is_zero())
                s += alpha[(size_t)j] * Cyclotomic((long)rs_.gram()[j][i]);
        return s;
    };
    if (m == 0) {
        for (auto &[k, c] : a.terms()) {
            Cyclotomic s;
            for (int i = 0; i < n; ++i)
                if (k.gamma[(size_t)i] != 0)
                    s += pair_with_basis(i) * Cyclotomic(k.gamma[(size_t)i]);
            out.add_term(k, c * s);
        }
        return out;
    }
    if (m < 0) {
        for (auto &[k, c] : a.terms())
            for (int i = 0; i < n; ++i) {
                if (alpha[(size_t)i].is_zero())
                    continue;
                out.add_term(StateKey{with_factor(k.mono, -m, i), k.gamma},
                             c * alpha[(size_t)i]);
            }
        return out;
    }
    // m > 0: contract against matching creation factors
    for (auto &[k, c] : a.terms()) {
        for (size_t f = 0; f < k.mono.factors.size(); ++f) {
            if (f > 0 && k.mono.factors[f] == k.mono.factors[f - 1])
                continue; // count each distinct factor once, with multiplicity
            auto [depth, idx] = k.mono.factors[f];
            if (depth != m)
                continue;
            long mult = (long)std::count(k.mono.factors.begin(), k.mono.factors.end(),
                                         k.mono.factors[f]);
            FockMonomial rest = k.mono;
            rest.factors.erase(rest.factors.begin() + (long)f);
            out.add_term(StateKey{rest, k.gamma},
                         c * Cyclotomic(mult * (long)m) * pair_with_basis(idx));
        }
    }
    return out;
}

LatticeState VertexAlgebra::heis_mode_basis(int i, int m, const LatticeState &a) const {
    std::vector<Cyclotomic> alpha((size_t)rs_.rank());
    alpha[(size_t)i] = Cyclotomic::one();
    return heis_mode(alpha, m, a);
}

LatticeState VertexAlgebra::heis_mode_rational(const std::vector<Rational> &alpha, int m,
                                               const LatticeState &a) const {
    return heis_mode(to_cyc(alpha), m, a);
}

LatticeState VertexAlgebra::e_mode(const IVec &alpha, int n, const LatticeState &a) const {
    LatticeState out;
    auto acyc = to_cyc(alpha);
    for (auto &[key, c0] : a.terms()) {
        long charge = rs_.pairing(alpha, key.gamma);
        int eps = seifert_.epsilon(alpha, key.gamma);
        IVec new_gamma(key.gamma.size());
        for (size_t i = 0; i < key.gamma.size(); ++i)
            new_gamma[i] = key.gamma[i] + alpha[i];

        // E^+ = exp(sum_{m>0} alpha_m zeta^{-m}/(-m)): levels by annihilated depth
        LatticeState base;
        base.add_term(key, Cyclotomic::one());
        std::map<long, LatticeState> eplus;
        std::map<long, LatticeState> power; // current (sum alpha_m/(-m))^r / r!
        power[0] = base;
        eplus = power;
        long wt = key.mono.weight();
        for (long r = 1; !power.empty(); ++r) {
            std::map<long, LatticeState> next;
            for (auto &[l, st] : power) {
                for (long m = 1; m + l <= wt; ++m) {
                    LatticeState ann = heis_mode(acyc, (int)m, st);
                    if (ann.is_zero())
                        continue;
                    LatticeState scaled = ann * Cyclotomic(Rational(-1, m * r));
                    auto it = next.find(l + m);
                    if (it == next.end())
                        next.emplace(l + m, scaled);
                    else
                        it->second += scaled;
                }
            }
            for (auto &[l, st] : next) {
                auto it = eplus.find(l);
                if (it == eplus.end())
                    eplus.emplace(l, st);
                else
                    it->second += st;
            }
            power = std::move(next);
        }

        // creation side: coefficient of zeta^{-n-1} overall selects the Schur index
        for (auto &[l, w] : eplus) {
            if (w.is_zero())
                continue;
            long j = -(long)n - 1 - charge + l;
            if (j < 0)
                continue;
            // S_j(alpha creations) w via  t*S_t = sum_m alpha_{(-m)} S_{t-m}
            std::vector<LatticeState> cs((size_t)j + 1);
            cs[0] = w;
            for (long t = 1; t <= j; ++t) {
                LatticeState acc;
                for (long m = 1; m <= t; ++m)
                    acc += heis_mode(acyc, (int)-m, cs[(size_t)(t - m)]);
                cs[(size_t)t] = acc * Cyclotomic(Rational(1, t));
            }
            for (auto &[k2, c2] : cs[(size_t)j].terms())
                out.add_term(StateKey{k2.mono, new_gamma},
                             c0 * c2 * Cyclotomic((long)eps));
        }
    }
    check_weight(out);
    return out;
}

LatticeState VertexAlgebra::term_nth_product(const StateKey &a, const StateKey &b,
                                             int n) const {
    auto memo_key = std::make_tuple(a, b, n);
    auto it = memo_.find(memo_key);
    if (it != memo_.end())
        return it->second;

    LatticeState bstate;
    bstate.add_term(b, Cyclotomic::one());

    LatticeState res;
    if (a.mono.factors.empty()) {
        bool zero_gamma = true;
        for (long g : a.gamma)
            if (g != 0)
                zero_gamma = false;
        if (zero_gamma) {
            if (n == -1)
                res = bstate;
        } else {
            res = e_mode(a.gamma, n, bstate);
        }
    } else {
        // peel the deepest creation factor:  a = e_{id,(-nd)} a'
        auto [nd, id] = a.mono.factors.back();
        StateKey ap = a;
        ap.mono.factors.pop_back();
        long wa = term_weight(StateKey{ap.mono, ap.gamma});
        long wb = term_weight(b);

        // (e_{(-nd)} a')_{(n)} b = sum_j C(nd-1+j, j) [ e_{(-nd-j)} (a'_{(n+j)} b)
        //                          - (-1)^{nd} a'_{(n-nd-j)} (e_{(j)} b) ]
        for (long j = 0; (long)n + j <= wa + wb - 1; ++j) {
            LatticeState inner = term_nth_product(ap, b, n + (int)j);
            if (inner.is_zero())
                continue;
            Cyclotomic coef = Cyclotomic(Rational(binomial_z(mpz_class(nd - 1 + j), (unsigned long)j)));
            res += heis_mode_basis(id, (int)-(nd + j), inner) * coef;
        }
        int sign = (nd % 2 == 0) ? 1 : -1; // -(-1)^{nd}... combined below
        for (long j = 0; j <= wb; ++j) {
            LatticeState hb = heis_mode_basis(id, (int)j, bstate);
            if (hb.is_zero())
                continue;
            Cyclotomic coef = Cyclotomic(Rational(binomial_z(mpz_class(nd - 1 + j), (unsigned long)j)));
            coef *= Cyclotomic((long)-sign);
            res += nth_product_term_state(ap, hb, n - nd - (int)j) * coef;
        }
    }
    check_weight(res);
    memo_.emplace(std::move(memo_key), res);
    return res;
}

LatticeState VertexAlgebra::nth_product_term_state(const StateKey &a, const LatticeState &b,
                                                   int n) const {
    LatticeState res;
    for (auto &[kb, cb] : b.terms())
        res += term_nth_product(a, kb, n) * cb;
    return res;
}

LatticeState VertexAlgebra::nth_product(const LatticeState &a, const LatticeState &b,
                                        int n) const {
    LatticeState res;
    for (auto &[ka, ca] : a.terms())
        res += nth_product_term_state(ka, b, n) * ca;
    return res;
}

LatticeState VertexAlgebra::screening(const IVec &alpha, const LatticeState &a) const {
    if (!rs_.is_root(alpha))
        throw NotARoot();
    return e_mode(alpha, 0, a);
}

bool VertexAlgebra::in_w_algebra(const LatticeState &a) const {
    if (!a.in_fock())
        throw NotInFock();
    // simple roots first for an early exit
    std::vector<IVec> order;
    for (int i = 0; i < rs_.rank(); ++i)
        order.push_back(rs_.simple_root(i));
    for (const auto &r : rs_.roots()) {
        bool simple = false;
        for (int i = 0; i < rs_.rank(); ++i)
            if (r == rs_.simple_root(i))
                simple = true;
        if (!simple)
            order.push_back(r);
    }
    for (const auto &alpha : order)
        if (!screening(alpha, a).is_zero())
            return false;
    return true;
}

LatticeState VertexAlgebra::build_omega() const {
    int n = rs_.rank();
    LatticeState w;
    IVec zero((size_t)n, 0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Rational c = gram_inv_[(size_t)i][(size_t)k] * Rational(1, 2);
            if (c.is_zero())
                continue;
            FockMonomial m;
            m.factors = {{1, std::min(i, k)}, {1, std::max(i, k)}};
            w.add_term(StateKey{m, zero}, Cyclotomic(c));
        }
    return w;
}

LatticeState VertexAlgebra::build_omega_d(int d) const {
    int n = rs_.rank();
    LatticeState w;
    IVec zero((size_t)n, 0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Rational c = gram_inv_[(size_t)i][(size_t)k];
            if (c.is_zero())
                continue;
            FockMonomial m;
            m.factors = {{1, i}, {d, k}};
            std::sort(m.factors.begin(), m.factors.end());
            w.add_term(StateKey{m, zero}, Cyclotomic(c));
        }
    for (const auto &alpha : rs_.roots()) {
        IVec minus(alpha.size());
        for (size_t i = 0; i < alpha.size(); ++i)
            minus[i] = -alpha[i];
        w -= e_mode(alpha, -d, LatticeState::lattice_point(minus));
    }
    return w;
}

LatticeState VertexAlgebra::build_pi_n() const {
    if (rs_.type() != 'D')
        throw UnsupportedType("pi^N exists for type D only");
    int n = rs_.rank();
    // orthonormal model vectors v_i in simple-root coordinates
    std::vector<std::vector<Rational>> v((size_t)n, std::vector<Rational>((size_t)n, Rational(0)));
    for (int i = 0; i < n - 1; ++i) {
        for (int j = i; j <= n - 3; ++j)
            v[(size_t)i][(size_t)j] = Rational(1);
        v[(size_t)i][(size_t)n - 2] = Rational(1, 2);
        v[(size_t)i][(size_t)n - 1] = Rational(1, 2);
    }
    v[(size_t)n - 1][(size_t)n - 2] = Rational(-1, 2);
    v[(size_t)n - 1][(size_t)n - 1] = Rational(1, 2);

    LatticeState s = vacuum();
    for (int i = n - 1; i >= 0; --i)
        s = heis_mode_rational(v[(size_t)i], -1, s);
    return s;
}

std::vector<Rational> VertexAlgebra::default_lambda0() const {
    if (rs_.type() == 'E' && rs_.rank() == 8)
        throw InadmissibleLambda0();
    int idx = (rs_.type() == 'E' && rs_.rank() == 7) ? 6 : 0;
    return rs_.fundamental_weight(idx);
}

std::vector<std::vector<Rational>>
VertexAlgebra::weyl_orbit(const std::vector<Rational> &lambda0) const {
    int n = rs_.rank();
    auto pair_root = [&](const std::vector<Rational> &lam, const IVec &alpha) {
        Rational s(0);
        for (int i = 0; i < n; ++i)
            if (alpha[(size_t)i] != 0)
                for (int j = 0; j < n; ++j)
                    s += Rational(alpha[(size_t)i] * rs_.gram()[i][j]) * lam[(size_t)j];
        return s;
    };
    std::set<std::vector<Rational>> seen{lambda0};
    std::vector<std::vector<Rational>> queue{lambda0};
    while (!queue.empty()) {
        auto lam = queue.back();
        queue.pop_back();
        for (int i = 0; i < n; ++i) {
            Rational p = pair_root(lam, rs_.simple_root(i));
            auto next = lam;
            next[(size_t)i] -= p;
            if (seen.insert(next).second)
                queue.push_back(next);
        }
    }
    return {seen.begin(), seen.end()};
}

LatticeState VertexAlgebra::build_nu_d(const std::vector<Rational> &lambda0, int d) const {
    int n = rs_.rank();
    auto pair_vec = [&](const std::vector<Rational> &a, const std::vector<Rational> &b) {
        Rational s(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s += a[(size_t)i] * Rational(rs_.gram()[i][j]) * b[(size_t)j];
        return s;
    };
    for (const auto &alpha : rs_.roots()) {
        std::vector<Rational> ar((size_t)n);
        for (int i = 0; i < n; ++i)
            ar[(size_t)i] = Rational(alpha[(size_t)i]);
        Rational p = pair_vec(lambda0, ar);
        if (!(p == Rational(0) || p == Rational(1) || p == Rational(-1)))
            throw InadmissibleLambda0();
    }

    // ceil(|lambda_0|^2): the norm of the padded lift into an integral lattice
    Rational norm = pair_vec(lambda0, lambda0);
    mpz_class n0z;
    mpz_cdiv_q(n0z.get_mpz_t(), norm.num().get_mpz_t(), norm.den().get_mpz_t());
    long n0 = n0z.get_si();
    long schur_index = d - 1 + n0;

    // sign cocycle on the extended lattice Z<alpha_1..alpha_N, lifted lambda_0>:
    // bimultiplicative, eps(b,b) = (-1)^{|b|^2(|b|^2+1)/2}, built on the basis
    int nb = n + 1;
    std::vector<std::vector<long>> ghat((size_t)nb, std::vector<long>((size_t)nb, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ghat[(size_t)i][(size_t)j] = rs_.gram()[i][j];
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> ei((size_t)n, Rational(0));
        ei[(size_t)i] = Rational(1);
        Rational p = pair_vec(ei, lambda0);
        if (!p.is_integer())
            throw InadmissibleLambda0();
        ghat[(size_t)i][(size_t)n] = ghat[(size_t)n][(size_t)i] = p.num().get_si();
    }
    ghat[(size_t)n][(size_t)n] = n0;
    std::vector<std::vector<long>> emat((size_t)nb, std::vector<long>((size_t)nb, 0));
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            long ni = ghat[(size_t)i][(size_t)i], nj = ghat[(size_t)j][(size_t)j];
            if (i > j)
                emat[(size_t)i][(size_t)j] = ghat[(size_t)i][(size_t)j] + ni * nj;
            else if (i == j)
                emat[(size_t)i][(size_t)j] = ni * (ni + 1) / 2;
        }
    auto eps_hat = [&](const std::vector<long> &x) {
        long e = 0;
        for (int i = 0; i < nb; ++i)
            if (x[(size_t)i] != 0)
                for (int j = 0; j < nb; ++j)
                    e += x[(size_t)i] * emat[(size_t)i][(size_t)j] * x[(size_t)j];
        return (e % 2 + 2) % 2 == 0 ? 1 : -1;
    };

    LatticeState nu;
    for (const auto &lam : weyl_orbit(lambda0)) {
        // coordinates of the lifted orbit point: (lam - lambda0 in Q, 1)
        std::vector<long> coords((size_t)nb, 0);
        for (int i = 0; i < n; ++i) {
            Rational diff = lam[(size_t)i] - lambda0[(size_t)i];
            if (!diff.is_integer())
                throw std::logic_error("orbit point not in lambda_0 + Q");
            coords[(size_t)i] = diff.num().get_si();
        }
        coords[(size_t)n] = 1;
        int kappa = eps_hat(coords);

        // e^lam_{(-d)} e^{-lam} = kappa * S_{d-1+n0}(lam creations) |0>
        std::vector<LatticeState> cs((size_t)schur_index + 1);
        cs[0] = vacuum();
        for (long t = 1; t <= schur_index; ++t) {
            LatticeState acc;
            for (long m = 1; m <= t; ++m)
                acc += heis_mode_rational(lam, (int)-m, cs[(size_t)(t - m)]);
            cs[(size_t)t] = acc * Cyclotomic(Rational(1, t));
        }
        nu += cs[(size_t)schur_index] * Cyclotomic((long)kappa);
    }
    return nu;
}

bool VertexAlgebra::borcherds_check(const LatticeState &a, const LatticeState &b,
                                    const LatticeState &c, int m, int n, int k) const {
    long wa = state_weight(a), wb = state_weight(b), wc = state_weight(c);

    LatticeState lhs;
    for (long j = 0; (long)k + j <= wb + wc - 1 || (long)m + j <= wa + wc - 1; ++j) {
        Rational bin = gen_binomial(Rational(n), (unsigned long)j);
        if (!bin.is_zero()) {
            Rational sgn = (j % 2 == 0) ? bin : -bin;
            LatticeState t1 = nth_product(a, nth_product(b, c, k + (int)j), m + n - (int)j);
            LatticeState t2 = nth_product(b, nth_product(a, c, m + (int)j), k + n - (int)j);
            Cyclotomic cs(sgn);
            lhs += t1 * cs;
            if (n % 2 == 0)
                lhs -= t2 * cs;
            else
                lhs += t2 * cs;
        }
    }
    LatticeState rhs;
    for (long j = 0; (long)n + j <= wa + wb - 1; ++j) {
        Rational bin = gen_binomial(Rational(m), (unsigned long)j);
        if (bin.is_zero())
            continue;
        rhs += nth_product(nth_product(a, b, n + (int)j), c, k + m - (int)j) * Cyclotomic(bin);
    }
    return lhs == rhs;
}

LatticeState VertexAlgebra::virasoro_mode(const LatticeState &omega, int m,
                                          const LatticeState &x) const {
    return nth_product(omega, x, m + 1);
}

std::vector<StateKey> VertexAlgebra::weight_basis(long wmax) const {
    int n = rs_.rank();
    // lattice points with |gamma|^2/2 <= wmax
    std::vector<IVec> points;
    long bound = 8;
    IVec cur((size_t)n, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == n) {
            if (rs_.pairing(cur, cur) <= 2 * wmax)
                points.push_back(cur);
            return;
        }
        for (long v = -bound; v <= bound; ++v) {
            cur[(size_t)pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    for (const auto &p : points)
        for (long v : p)
            if (std::abs(v) >= bound)
                throw std::logic_error("lattice enumeration bound too small");

    // Fock monomials of each weight
    std::vector<std::vector<FockMonomial>> monos((size_t)wmax + 1);
    FockMonomial m0;
    std::function<void(long, int, int, FockMonomial &)> mrec =
        [&](long left, int min_depth, int min_idx, FockMonomial &acc) {
            monos[(size_t)(wmax - left)].push_back(acc);
            for (int d = min_depth; d <= left; ++d)
                for (int i = (d == min_depth ? min_idx : 0); i < n; ++i) {
                    acc.factors.emplace_back(d, i);
                    mrec(left - d, d, i, acc);
                    acc.factors.pop_back();
                }
        };
    mrec(wmax, 1, 0, m0);

    std::vector<StateKey> basis;
    for (const auto &gamma : points) {
        long g2 = rs_.pairing(gamma, gamma) / 2;
        for (long w = 0; w + g2 <= wmax; ++w)
            for (const auto &m : monos[(size_t)w])
                basis.push_back(StateKey{m, gamma});
    }
    return basis;
}

} // namespace walg
