#include "walg/twisted_fock.hpp"

#include <algorithm>
#include <functional>

namespace walg {

long mi_length(const MultiIndex &m) {
    long l = 0;
    for (auto &[v, e] : m)
        l += e;
    return l;
}

MultiIndex mi_mul(const MultiIndex &a, const MultiIndex &b) {
    MultiIndex r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            r.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first)
            r.push_back(b[j++]);
        else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return r;
}

int mi_max_mode(const MultiIndex &m) {
    int k = -1;
    for (auto &[v, e] : m)
        k = std::max(k, v.k);
    return k;
}

namespace {

MultiIndex mi_single(VarId v, int e = 1) { return MultiIndex{{v, e}}; }

/// falling-factorial action of d^J on q^M; returns 0 if J exceeds M
Rational derivative_factor(const MultiIndex &mono, const MultiIndex &J, MultiIndex &out) {
    Rational f(1);
    out.clear();
    size_t i = 0;
    for (auto &[v, j] : J) {
        while (i < mono.size() && mono[i].first < v) {
            out.push_back(mono[i]);
            ++i;
        }
        if (i == mono.size() || !(mono[i].first == v) || mono[i].second < j)
            return Rational(0);
        long m = mono[i].second;
        for (long s = 0; s < j; ++s)
            f *= Rational(m - s);
        if (m > j)
            out.emplace_back(v, (int)(m - j));
        ++i;
    }
    while (i < mono.size())
        out.push_back(mono[i++]);
    return f;
}

// truncated power series over the cyclotomic field
struct Ser {
    std::vector<Cyclotomic> c;
    explicit Ser(size_t terms) : c(terms) {}
    static Ser one(size_t terms) {
        Ser s(terms);
        s.c[0] = Cyclotomic::one();
        return s;
    }
    Ser mul(const Ser &o) const {
        Ser r(c.size());
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i].is_zero())
                continue;
            for (size_t j = 0; i + j < c.size(); ++j)
                if (!o.c[j].is_zero())
                    r.c[i + j] += c[i] * o.c[j];
        }
        return r;
    }
    Ser inverse() const {
        if (c[0].is_zero())
            throw std::domain_error("series not invertible");
        Ser r(c.size());
        r.c[0] = c[0].inv();
        for (size_t n = 1; n < c.size(); ++n) {
            Cyclotomic s;
            for (size_t j = 1; j <= n; ++j)
                if (!c[j].is_zero())
                    s += c[j] * r.c[n - j];
            r.c[n] = -s * r.c[0];
        }
        return r;
    }
    Ser pow(long e) const {
        Ser base = e < 0 ? inverse() : *this;
        unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
        Ser r = one(c.size());
        while (n) {
            if (n & 1)
                r = r.mul(base);
            base = base.mul(base);
            n >>= 1;
        }
        return r;
    }
    /// (1+u)^p for rational p
    static Ser binomial(const Rational &p, size_t terms) {
        Ser r(terms);
        for (size_t s = 0; s < terms; ++s)
            r.c[s] = Cyclotomic(gen_binomial(p, s));
        return r;
    }
};

} // namespace

NormalOrderedOperator
NormalOrderedOperator::normal_product(const NormalOrderedOperator &o) const {
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_ || o.tail_unbounded_;
    for (auto &[ka, ca] : terms_)
        for (auto &[kb, cb] : o.terms_)
            r.add_term(Key{mi_mul(ka.q, kb.q), mi_mul(ka.dq, kb.dq), ka.lambda + kb.lambda},
                       ca * cb);
    return r;
}

NormalOrderedOperator NormalOrderedOperator::shift_lambda(const Rational &e,
                                                          const Cyclotomic &c) const {
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_;
    for (auto &[k, v] : terms_)
        r.add_term(Key{k.q, k.dq, k.lambda + e}, v * c);
    return r;
}

NormalOrderedOperator NormalOrderedOperator::d_lambda() const {
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_;
    for (auto &[k, v] : terms_) {
        if (k.lambda.is_zero())
            continue;
        r.add_term(Key{k.q, k.dq, k.lambda - Rational(1)}, v * Cyclotomic(k.lambda));
    }
    return r;
}

NormalOrderedOperator NormalOrderedOperator::truncate(const LaurentWindow &w) const {
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_;
    for (auto &[k, v] : terms_)
        if (w.contains(k.lambda))
            r.add_term(k, v);
    return r;
}

NormalOrderedOperator NormalOrderedOperator::lambda_coefficient(const Rational &e) const {
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_;
    for (auto &[k, v] : terms_)
        if (k.lambda == e)
            r.add_term(Key{k.q, k.dq, Rational(0)}, v);
    return r;
}

bool NormalOrderedOperator::lambda_powers_integral() const {
    for (auto &[k, v] : terms_)
        if (!k.lambda.is_integer())
            return false;
    return true;
}

std::map<Rational, PolyVec> NormalOrderedOperator::apply(const PolyVec &v) const {
    std::map<Rational, PolyVec> out;
    MultiIndex reduced;
    for (auto &[k, c] : terms_) {
        for (auto &[pk, pc] : v.terms()) {
            Rational f = derivative_factor(pk.mono, k.dq, reduced);
            if (f.is_zero())
                continue;
            PolyKey nk{mi_mul(reduced, k.q), pk.hbar_half + hbar_half(k)};
            out[k.lambda].add_term(nk, c * pc * Cyclotomic(f));
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

PolyVec NormalOrderedOperator::apply_flat(const PolyVec &v) const {
    PolyVec r;
    for (auto &[e, pv] : apply(v))
        r += pv;
    return r;
}

NormalOrderedOperator NormalOrderedOperator::compose(const NormalOrderedOperator &o,
                                                     Topology topology) const {
    (void)topology; // the stabilization requirement below is direction-free
    // (*this) after o: reorder d^{J1} q^{I2} with all contractions
    int boundary = -1;
    if (tail_unbounded_ && o.tail_unbounded_) {
        int da = -1, qb = -1;
        for (auto &[k, c] : terms_)
            da = std::max(da, mi_max_mode(k.dq));
        for (auto &[k, c] : o.terms_)
            qb = std::max(qb, mi_max_mode(k.q));
        if (da >= 0 && qb >= 0)
            boundary = std::min(da, qb);
    }
    NormalOrderedOperator r;
    r.tail_unbounded_ = tail_unbounded_ || o.tail_unbounded_;
    for (auto &[ka, ca] : terms_) {
        for (auto &[kb, cb] : o.terms_) {
            std::vector<std::tuple<VarId, int, int>> shared; // var, j-exp, i-exp
            for (auto &[v, j] : ka.dq)
                for (auto &[w, i] : kb.q)
                    if (v == w)
                        shared.emplace_back(v, j, i);
            std::function<void(size_t, Rational, MultiIndex, MultiIndex)> rec =
                [&](size_t idx, Rational coef, MultiIndex used_dq, MultiIndex used_q) {
                    if (idx == shared.size()) {
                        auto sub = [](const MultiIndex &a, const MultiIndex &b) {
                            MultiIndex r2;
                            size_t i = 0, j = 0;
                            while (i < a.size()) {
                                int e = a[i].second;
                                if (j < b.size() && b[j].first == a[i].first) {
                                    e -= b[j].second;
                                    ++j;
                                }
                                if (e > 0)
                                    r2.emplace_back(a[i].first, e);
                                ++i;
                            }
                            return r2;
                        };
                        MultiIndex q = mi_mul(ka.q, sub(kb.q, used_q));
                        MultiIndex dq = mi_mul(sub(ka.dq, used_dq), kb.dq);
                        r.add_term(Key{q, dq, ka.lambda + kb.lambda},
                                   ca * cb * Cyclotomic(coef));
                        return;
                    }
                    auto [v, j, i] = shared[idx];
                    for (int t = 0; t <= std::min(i, j); ++t) {
                        if (t > 0 && boundary >= 0 && v.k >= boundary - 1)
                            throw NonConvergent(); // contraction family reaches the cut
                        Rational c2 = coef * Rational(factorial((unsigned long)t)) *
                                      gen_binomial(Rational(j), (unsigned long)t) *
                                      gen_binomial(Rational(i), (unsigned long)t);
                        MultiIndex ud = used_dq, uq = used_q;
                        if (t > 0) {
                            ud = mi_mul(ud, mi_single(v, t));
                            uq = mi_mul(uq, mi_single(v, t));
                        }
                        rec(idx + 1, c2, ud, uq);
                    }
                };
            rec(0, Rational(1), {}, {});
        }
    }
    return r;
}

TwistedModule::TwistedModule(const VertexAlgebra &va)
    : va_(va), frame_(va.root_system(), va.coxeter_element()) {
    int n = va_.rank();
    basis_in_frame_.resize((size_t)n);
    for (int i = 0; i < n; ++i) {
        std::vector<Cyclotomic> e((size_t)n);
        e[(size_t)i] = Cyclotomic::one();
        basis_in_frame_[(size_t)i] = frame_.frame_coordinates(e);
    }
    // the multiplicative extension of U off the basis must not depend on the
    // bracketing; spot-check the cocycle relation on mixed-sign pairs
    for (long x = -1; x <= 1; ++x)
        for (long y = -1; y <= 1; ++y) {
            IVec a((size_t)n, 0), b((size_t)n, 0), ab((size_t)n, 0);
            a[0] = x;
            b[(size_t)(n - 1)] += y;
            b[0] += -x;
            for (int i = 0; i < n; ++i)
                ab[(size_t)i] = a[(size_t)i] + b[(size_t)i];
            Cyclotomic lhs = u_scalar(a) * u_scalar(b);
            Cyclotomic rhs = Cyclotomic((long)va_.seifert().epsilon(a, b)) *
                             b_scalar(va_.root_system(), va_.coxeter_element(), a, b).inv() *
                             u_scalar(ab);
            if (!(lhs == rhs))
                throw std::logic_error("U cocycle extension is inconsistent");
        }
}

Rational TwistedModule::p_of(int j) const {
    return Rational(frame_.exponent(j), (long)h());
}

NormalOrderedOperator TwistedModule::generator_field(int j, const LaurentWindow &w,
                                                     int kmax) const {
    NormalOrderedOperator op;
    Rational p = p_of(j);
    int jstar = frame_.partner(j);
    for (int k = 0; k <= kmax; ++k) {
        Rational ec = Rational(k - 1) + p;
        if (w.contains(ec))
            op.add_term({mi_single(VarId{j, k}), {}, ec},
                        Cyclotomic(pochhammer(p, (unsigned long)k).inv()));
        Rational ea = Rational(-k - 2) + p;
        if (w.contains(ea))
            op.add_term({{}, mi_single(VarId{jstar, k}), ea},
                        Cyclotomic(pochhammer(Rational(1) - p, (unsigned long)k + 1)));
    }
    op.mark_tail_unbounded();
    return op;
}

NormalOrderedOperator TwistedModule::twisted_generator(int j, const LaurentWindow &w,
                                                       int kmax) const {
    return generator_field(frame_.partner(j), w, kmax);
}

std::map<Rational, PolyVec> TwistedModule::apply_generator(int j, const PolyVec &v,
                                                           const Rational &lo,
                                                           const Rational &hi) const {
    std::map<Rational, PolyVec> out;
    Rational p = p_of(j);
    int jstar = frame_.partner(j);
    for (int k = 0;; ++k) {
        Rational e = Rational(k - 1) + p;
        if (e > hi)
            break;
        if (e < lo)
            continue;
        Cyclotomic coef(pochhammer(p, (unsigned long)k).inv());
        for (auto &[pk, pc] : v.terms())
            out[e].add_term(PolyKey{mi_mul(pk.mono, mi_single(VarId{j, k})), pk.hbar_half - 1},
                            pc * coef);
    }
    for (auto &[pk, pc] : v.terms()) {
        MultiIndex rest;
        for (auto &[var, exp] : pk.mono) {
            if (var.j != jstar)
                continue;
            Rational e = Rational(-var.k - 2) + p;
            if (e < lo || e > hi)
                continue;
            Rational f = derivative_factor(pk.mono, mi_single(var), rest);
            out[e].add_term(
                PolyKey{rest, pk.hbar_half + 1},
                pc * Cyclotomic(f * pochhammer(Rational(1) - p, (unsigned long)var.k + 1)));
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

namespace {
Rational rho_coeff(const Rational &p, int k) {
    return gen_binomial(-p, (unsigned long)(k + 2)) +
           p * gen_binomial(-p, (unsigned long)(k + 1));
}
} // namespace

Cyclotomic TwistedModule::propagator_coeff(int a, int b, int k) const {
    Cyclotomic pair = frame_.pair(frame_.vector(a), frame_.vector(b));
    if (pair.is_zero())
        return Cyclotomic::zero();
    return pair * Cyclotomic(rho_coeff(Rational(1) - p_of(a), k));
}

Cyclotomic TwistedModule::propagator_coeff(const std::vector<Cyclotomic> &alpha,
                                           const std::vector<Cyclotomic> &beta, int k) const {
    Cyclotomic s;
    for (int a = 0; a < rank(); ++a) {
        int b = frame_.partner(a);
        if (alpha[(size_t)a].is_zero() || beta[(size_t)b].is_zero())
            continue;
        s += alpha[(size_t)a] * beta[(size_t)b] *
             Cyclotomic(rho_coeff(Rational(1) - p_of(a), k));
    }
    return s;
}

Cyclotomic TwistedModule::wick_pair_coeff(int a, int ka, int b, int kb) const {
    Cyclotomic s;
    for (int d = 0; d <= kb; ++d) {
        Cyclotomic term = propagator_coeff(a, b, ka + d);
        if (term.is_zero())
            continue;
        Rational f = gen_binomial(Rational(ka + d), (unsigned long)d) *
                     gen_binomial(Rational(-(ka + d) - 2), (unsigned long)(kb - d));
        if (d % 2)
            f = -f;
        s += term * Cyclotomic(f);
    }
    return s;
}

std::vector<std::pair<Cyclotomic, std::vector<std::pair<int, int>>>>
TwistedModule::frame_slots(const LatticeState &a) const {
    if (!a.in_fock())
        throw NotInFock();
    std::vector<std::pair<Cyclotomic, std::vector<std::pair<int, int>>>> out;
    int n = rank();
    for (auto &[key, c0] : a.terms()) {
        std::vector<std::pair<Cyclotomic, std::vector<std::pair<int, int>>>> partial{{c0, {}}};
        for (auto &[depth, i] : key.mono.factors) {
            std::vector<std::pair<Cyclotomic, std::vector<std::pair<int, int>>>> next;
            for (auto &[coef, slots] : partial)
                for (int j = 0; j < n; ++j) {
                    Cyclotomic cj = basis_in_frame_[(size_t)i][(size_t)j];
                    if (cj.is_zero())
                        continue;
                    auto s2 = slots;
                    s2.emplace_back(j, depth - 1);
                    next.emplace_back(coef * cj, std::move(s2));
                }
            partial = std::move(next);
        }
        for (auto &p : partial)
            out.push_back(std::move(p));
    }
    return out;
}

NormalOrderedOperator TwistedModule::twisted_field(const LatticeState &a,
                                                   const LaurentWindow &w, int kmax) const {
    NormalOrderedOperator result;
    auto slots_list = frame_slots(a);

    for (auto &[coef, slots] : slots_list) {
        size_t r = slots.size();
        std::vector<int> state(r, -2); // -2 unused, -1 single, >=0 partner
        std::function<void()> emit = [&]() {
            Cyclotomic pair_c = coef;
            Rational pair_shift(0);
            std::vector<size_t> singles;
            for (size_t s = 0; s < r; ++s) {
                if (state[s] == -1) {
                    singles.push_back(s);
                } else if (state[s] >= 0 && (size_t)state[s] > s) {
                    size_t t = (size_t)state[s];
                    auto [ja, ka] = slots[s];
                    auto [jb, kb] = slots[t];
                    Cyclotomic wc = wick_pair_coeff(ja, ka, jb, kb);
                    if (wc.is_zero())
                        return;
                    pair_c *= wc;
                    pair_shift += Rational(-(ka + kb) - 2);
                }
            }
            NormalOrderedOperator prod;
            prod.add_term({{}, {}, Rational(0)}, pair_c);
            for (size_t s : singles) {
                auto [j, k] = slots[s];
                Rational p = p_of(j);
                int jstar = frame_.partner(j);
                NormalOrderedOperator factor;
                for (int kk = 0; kk <= kmax; ++kk) {
                    Rational e = Rational(kk - 1) + p;
                    Rational dc = gen_binomial(e, (unsigned long)k);
                    if (!dc.is_zero())
                        factor.add_term(
                            {mi_single(VarId{j, kk}), {}, e - Rational(k)},
                            Cyclotomic(dc * pochhammer(p, (unsigned long)kk).inv()));
                    Rational ea = Rational(-kk - 2) + p;
                    Rational da = gen_binomial(ea, (unsigned long)k);
                    if (!da.is_zero())
                        factor.add_term(
                            {{}, mi_single(VarId{jstar, kk}), ea - Rational(k)},
                            Cyclotomic(da * pochhammer(Rational(1) - p, (unsigned long)kk + 1)));
                }
                prod = prod.normal_product(factor);
            }
            result += prod.shift_lambda(pair_shift, Cyclotomic::one()).truncate(w);
        };
        std::function<void(size_t)> rec = [&](size_t s) {
            if (s == r) {
                emit();
                return;
            }
            if (state[s] != -2) {
                rec(s + 1);
                return;
            }
            state[s] = -1;
            rec(s + 1);
            for (size_t t = s + 1; t < r; ++t) {
                if (state[t] != -2)
                    continue;
                state[s] = (int)t;
                state[t] = (int)s;
                rec(s + 1);
                state[t] = -2;
            }
            state[s] = -2;
        };
        rec(0);
    }
    result.mark_tail_unbounded();
    return result;
}

NormalOrderedOperator TwistedModule::schur_field(const std::vector<Cyclotomic> &alpha_frame,
                                                 int n, const LaurentWindow &w,
                                                 int kmax) const {
    // S_n with x_s = (1/s) d^{(s-1)} alpha(lambda), all products normally ordered
    NormalOrderedOperator result;
    auto x_op = [&](int s) {
        NormalOrderedOperator op;
        for (int j = 0; j < rank(); ++j) {
            if (alpha_frame[(size_t)j].is_zero())
                continue;
            Rational p = p_of(j);
            int jstar = frame_.partner(j);
            for (int kk = 0; kk <= kmax; ++kk) {
                Rational e = Rational(kk - 1) + p;
                Rational dc = gen_binomial(e, (unsigned long)(s - 1));
                if (!dc.is_zero())
                    op.add_term({mi_single(VarId{j, kk}), {}, e - Rational(s - 1)},
                                alpha_frame[(size_t)j] *
                                    Cyclotomic(dc * pochhammer(p, (unsigned long)kk).inv() /
                                               Rational(s)));
                Rational ea = Rational(-kk - 2) + p;
                Rational da = gen_binomial(ea, (unsigned long)(s - 1));
                if (!da.is_zero())
                    op.add_term({{}, mi_single(VarId{jstar, kk}), ea - Rational(s - 1)},
                                alpha_frame[(size_t)j] *
                                    Cyclotomic(da *
                                               pochhammer(Rational(1) - p,
                                                          (unsigned long)kk + 1) /
                                               Rational(s)));
            }
        }
        return op;
    };
    NormalOrderedOperator one;
    one.add_term({{}, {}, Rational(0)}, Cyclotomic::one());
    if (n == 0)
        return one;
    std::function<void(int, int, NormalOrderedOperator, Rational)> rec =
        [&](int left, int smin, NormalOrderedOperator acc, Rational sym) {
            if (left == 0) {
                result += acc * Cyclotomic(sym);
                return;
            }
            for (int s = smin; s <= left; ++s) {
                NormalOrderedOperator xs = x_op(s);
                NormalOrderedOperator cur = acc;
                Rational sy = sym;
                for (int i = 1; s * i <= left; ++i) {
                    cur = cur.normal_product(xs);
                    sy /= Rational(i);
                    rec(left - s * i, s + 1, cur, sy);
                }
            }
        };
    rec(n, 1, one, Rational(1));
    return result.truncate(w);
}

Cyclotomic TwistedModule::c_coeff(const IVec &alpha, int k) const {
    if (!va_.root_system().is_root(alpha))
        throw NotARoot();
    const auto &rs = va_.root_system();
    const auto &cox = va_.coxeter_element();
    unsigned hh = h();
    size_t terms = (size_t)k + 1;
    Ser ser = Ser::binomial(Rational(-1), terms); // x^{-|alpha|^2/2} = (1+u)^{-1}
    Ser x1h = Ser::binomial(Rational(1, (long)hh), terms);
    IVec sa = alpha;
    for (unsigned kk = 1; kk < hh; ++kk) {
        sa = cox.apply(sa);
        long e = rs.pairing(alpha, alpha) - rs.pairing(sa, alpha);
        if (e == 0)
            continue;
        Ser base = x1h;
        base.c[0] -= Cyclotomic::root_of_unity(hh, (long)kk);
        ser = ser.mul(base.pow(e));
    }
    return b_scalar(rs, cox, alpha, alpha) * ser.c[(size_t)k];
}

NormalOrderedOperator TwistedModule::e_pair_field(const IVec &alpha, int d,
                                                  const LaurentWindow &w, int kmax) const {
    long a2 = va_.root_system().pairing(alpha, alpha);
    std::vector<Cyclotomic> acyc((size_t)rank());
    for (int i = 0; i < rank(); ++i)
        acyc[(size_t)i] = Cyclotomic(alpha[(size_t)i]);
    auto aframe = frame_.frame_coordinates(acyc);
    long top = a2 - 1 + d;
    NormalOrderedOperator sum;
    for (long k = 0; k <= top; ++k) {
        Cyclotomic ck = c_coeff(alpha, (int)k);
        if (ck.is_zero())
            continue;
        sum += schur_field(aframe, (int)(top - k), w, kmax).shift_lambda(Rational(-k), ck);
    }
    long sgn = (a2 * (a2 + 1) / 2) % 2;
    return (sgn ? sum * Cyclotomic(-1l) : sum).truncate(w);
}

Cyclotomic TwistedModule::u_scalar(const IVec &alpha) const {
    auto it = u_cache_.find(alpha);
    if (it != u_cache_.end())
        return it->second;
    int n = rank();
    bool zero = true;
    for (long v : alpha)
        if (v != 0)
            zero = false;
    Cyclotomic result;
    if (zero) {
        result = Cyclotomic::one();
    } else {
        // U_{x+b} = U_x U_b eps(x,b) B_{x,b}, peeling one signed basis step
        int i = 0;
        while (alpha[(size_t)i] == 0)
            ++i;
        long step = alpha[(size_t)i] > 0 ? 1 : -1;
        IVec b((size_t)n, 0);
        b[(size_t)i] = step;
        IVec rest = alpha;
        rest[(size_t)i] -= step;
        Cyclotomic ub;
        if (step == 1) {
            ub = Cyclotomic::one();
        } else {
            IVec e((size_t)n, 0);
            e[(size_t)i] = 1;
            Cyclotomic beb = b_scalar(va_.root_system(), va_.coxeter_element(), e, b);
            int ee = va_.seifert().epsilon(e, b);
            ub = (beb * Cyclotomic((long)ee)).inv();
        }
        Cyclotomic brest = b_scalar(va_.root_system(), va_.coxeter_element(), rest, b);
        int eps = va_.seifert().epsilon(rest, b);
        result = u_scalar(rest) * ub * brest * Cyclotomic((long)eps);
    }
    u_cache_.emplace(alpha, result);
    return result;
}

NormalOrderedOperator TwistedModule::vertex_operator(const IVec &alpha, const LaurentWindow &w,
                                                     int kmax, int max_factors) const {
    long a2 = va_.root_system().pairing(alpha, alpha);
    std::vector<Cyclotomic> acyc((size_t)rank());
    for (int i = 0; i < rank(); ++i)
        acyc[(size_t)i] = Cyclotomic(alpha[(size_t)i]);
    auto aframe = frame_.frame_coordinates(acyc);
    NormalOrderedOperator cre, ann;
    for (int j = 0; j < rank(); ++j) {
        if (aframe[(size_t)j].is_zero())
            continue;
        Rational p = p_of(j);
        int jstar = frame_.partner(j);
        for (int k = 0; k <= kmax; ++k) {
            cre.add_term({mi_single(VarId{j, k}), {}, Rational(k) + p},
                         aframe[(size_t)j] * Cyclotomic(pochhammer(p, (unsigned long)k).inv() /
                                                        (Rational(k) + p)));
            ann.add_term({{}, mi_single(VarId{jstar, k}), -(Rational(k + 1) - p)},
                         -aframe[(size_t)j] *
                             Cyclotomic(pochhammer(Rational(1) - p, (unsigned long)k + 1) /
                                        (Rational(k + 1) - p)));
        }
    }
    auto exp_op = [&](const NormalOrderedOperator &x) {
        NormalOrderedOperator acc, pw;
        acc.add_term({{}, {}, Rational(0)}, Cyclotomic::one());
        pw = acc;
        Rational fact(1);
        for (int r = 1; r <= max_factors; ++r) {
            pw = pw.normal_product(x);
            fact *= Rational(r);
            acc += pw * Cyclotomic(fact.inv());
        }
        return acc;
    };
    NormalOrderedOperator g = exp_op(cre).normal_product(exp_op(ann));
    g.mark_tail_unbounded();
    return g.shift_lambda(Rational(-a2, 2), u_scalar(alpha)).truncate(w);
}

TwistedModule::PhaseExpansion TwistedModule::phase_factor(const IVec &alpha, const IVec &beta,
                                                          int terms) const {
    const auto &rs = va_.root_system();
    const auto &cox = va_.coxeter_element();
    unsigned hh = h();
    std::vector<long> e((size_t)hh);
    e[0] = rs.pairing(alpha, beta);
    IVec sa = alpha;
    long esum = e[0];
    for (unsigned k = 1; k < hh; ++k) {
        sa = cox.apply(sa);
        e[(size_t)k] = rs.pairing(sa, beta);
        esum += e[(size_t)k];
    }
    if (esum != 0)
        throw std::logic_error("sigma-orbit pairing sum must vanish");

    Ser f = Ser::one((size_t)terms);
    for (unsigned k = 0; k < hh; ++k) {
        if (e[(size_t)k] == 0)
            continue;
        Ser base = Ser::one((size_t)terms);
        if (terms > 1)
            base.c[1] = -Cyclotomic::root_of_unity(hh, (long)k);
        f = f.mul(base.pow(e[(size_t)k]));
    }
    PhaseExpansion pe;
    for (long s = 0; s < terms; ++s)
        if (!f.c[(size_t)s].is_zero())
            pe.y_series[s] = f.c[(size_t)s];
    pe.xi_exponent = e[0];
    pe.unit = Cyclotomic::one();
    for (unsigned k = 1; k < hh; ++k)
        if (e[(size_t)k] != 0)
            pe.unit *=
                (Cyclotomic::one() - Cyclotomic::root_of_unity(hh, (long)k)).pow(e[(size_t)k]);
    return pe;
}

bool TwistedModule::twisted_product_check(int ja, int jb, int k, const PolyVec &c,
                                          const Rational &target_range) const {
    Cyclotomic pair = frame_.pair(frame_.vector(ja), frame_.vector(jb));
    int N = pair.is_zero() ? 0 : 2;
    Rational T = target_range;

    int kc = std::max(c.max_mode(), 0);
    Rational lo2 = Rational(-kc - 3);
    Rational hi2 = T + Rational(k + N + kc + 8);
    auto stage1 = apply_generator(jb, c, lo2, hi2);

    std::map<std::pair<Rational, Rational>, PolyVec> raw;
    Rational lo1 = Rational(-(kc + 3)) - hi2;
    Rational hi1 = T + Rational(k + N) - lo2 + Rational(2);
    for (auto &[s2, vec2] : stage1) {
        auto stage2 = apply_generator(ja, vec2, lo1, hi1);
        for (auto &[s1, vec1] : stage2)
            raw[{s1, s2}] += vec1;
    }

    std::map<std::pair<Rational, Rational>, PolyVec> prod;
    for (auto &[key, v] : raw) {
        for (int i = 0; i <= N; ++i) {
            Rational bin = gen_binomial(Rational(N), (unsigned long)i);
            if ((N - i) % 2)
                bin = -bin;
            prod[{key.first + Rational(i), key.second + Rational(N - i)}] +=
                v * Cyclotomic(bin);
        }
    }

    // lo1/lo2 sit below the natural annihilation floors, so raw slots under
    // them are genuinely zero; only entries leaning on the hi1/hi2 caps are
    // unknown and must be dropped
    auto valid = [&](const Rational &s1, const Rational &s2) {
        return s1 <= hi1 && s2 <= hi2;
    };
    Rational floor1 = hi1, floor2 = hi2;
    for (auto &[key, v] : prod) {
        if (!valid(key.first, key.second) || v.is_zero())
            continue;
        floor1 = std::min(floor1, key.first);
        floor2 = std::min(floor2, key.second);
    }
    // entries beyond the caps must not be able to reach the compared range
    if (T + Rational(k) - hi2 >= floor1 - Rational(1) ||
        T + Rational(k) - hi1 >= floor2 - Rational(1))
        throw TruncationExceeded();

    std::map<Rational, PolyVec> lhs;
    for (auto &[key, v] : prod) {
        if (!valid(key.first, key.second))
            continue;
        Rational dc = gen_binomial(key.first, (unsigned long)k);
        if (dc.is_zero())
            continue;
        Rational u = key.first - Rational(k) + key.second;
        if (u < -T || u > T)
            continue;
        lhs[u] += v * Cyclotomic(dc);
    }

    auto hstate = [&](int j) {
        std::vector<Cyclotomic> coords((size_t)rank());
        for (int i = 0; i < rank(); ++i)
            coords[(size_t)i] = frame_.vector(j)[(size_t)i];
        return va_.heis_mode(coords, -1, va_.vacuum());
    };
    LatticeState ab = va_.nth_product(hstate(ja), hstate(jb), N - 1 - k);
    std::map<Rational, PolyVec> rhs;
    if (!ab.is_zero()) {
        int kmax = kc + (int)(T.num().get_si() / T.den().get_si()) + 4;
        LaurentWindow w{-T - Rational(1), T + Rational(1)};
        NormalOrderedOperator op = twisted_field(ab, w, kmax);
        for (auto &[e, pv] : op.apply(c))
            if (e >= -T && e <= T)
                rhs[e] += pv;
    }
    for (auto it = lhs.begin(); it != lhs.end();)
        it = it->second.is_zero() ? lhs.erase(it) : std::next(it);
    for (auto it = rhs.begin(); it != rhs.end();)
        it = it->second.is_zero() ? rhs.erase(it) : std::next(it);
    if (lhs.size() != rhs.size())
        return false;
    for (auto &[e, pv] : lhs) {
        auto it2 = rhs.find(e);
        if (it2 == rhs.end() || !(it2->second == pv))
            return false;
    }
    return true;
}

} // namespace walg
