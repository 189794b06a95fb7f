#include "walg/root_system.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace walg {

RootSystem RootSystem::build(char type_letter, int rank) {
    RootSystem rs;
    rs.type_ = type_letter;
    rs.rank_ = rank;
    int n = rank;
    auto edge = [&](IMat &c, int i, int j) { c[i][j] = c[j][i] = -1; };
    rs.cartan_.assign(n, IVec(n, 0));
    for (int i = 0; i < n; ++i)
        rs.cartan_[i][i] = 2;

    switch (type_letter) {
    case 'A': {
        if (rank < 1)
            throw UnsupportedType("A_N needs N >= 1");
        for (int i = 0; i + 1 < n; ++i)
            edge(rs.cartan_, i, i + 1);
        rs.h_ = (unsigned)(rank + 1);
        for (int i = 1; i <= rank; ++i)
            rs.exponents_.push_back(i);
        break;
    }
    case 'D': {
        if (rank < 4)
            throw UnsupportedType("D_N needs N >= 4");
        for (int i = 0; i + 2 < n; ++i)
            edge(rs.cartan_, i, i + 1);
        edge(rs.cartan_, n - 3, n - 1);
        rs.h_ = (unsigned)(2 * rank - 2);
        for (int i = 1; i <= rank - 1; ++i)
            rs.exponents_.push_back(2 * i - 1);
        rs.exponents_.push_back(rank - 1);
        std::sort(rs.exponents_.begin(), rs.exponents_.end());
        break;
    }
    case 'E': {
        if (rank < 6 || rank > 8)
            throw UnsupportedType("E_N needs N in {6,7,8}");
        // Bourbaki numbering: 1-3, 2-4, 3-4-5-6(-7)(-8)
        edge(rs.cartan_, 0, 2);
        edge(rs.cartan_, 1, 3);
        for (int i = 2; i + 1 < n; ++i)
            edge(rs.cartan_, i, i + 1);
        if (rank == 6) {
            rs.h_ = 12;
            rs.exponents_ = {1, 4, 5, 7, 8, 11};
        } else if (rank == 7) {
            rs.h_ = 18;
            rs.exponents_ = {1, 5, 7, 9, 11, 13, 17};
        } else {
            rs.h_ = 30;
            rs.exponents_ = {1, 7, 11, 13, 17, 19, 23, 29};
        }
        break;
    }
    default:
        throw UnsupportedType("type letter must be A, D or E");
    }

    // enumerate roots: closure of the simple roots under simple reflections
    std::set<IVec> seen;
    std::vector<IVec> queue;
    for (int i = 0; i < n; ++i) {
        IVec e(n, 0);
        e[i] = 1;
        seen.insert(e);
        queue.push_back(e);
        IVec me(n, 0);
        me[i] = -1;
        seen.insert(me);
        queue.push_back(me);
    }
    while (!queue.empty()) {
        IVec v = queue.back();
        queue.pop_back();
        for (int i = 0; i < n; ++i) {
            long pair = 0;
            for (int j = 0; j < n; ++j)
                pair += rs.cartan_[i][j] * v[j];
            IVec w = v;
            w[i] -= pair;
            if (seen.insert(w).second)
                queue.push_back(w);
        }
    }
    rs.roots_.assign(seen.begin(), seen.end());

    if (rs.roots_.size() != (size_t)n * rs.h_)
        throw std::logic_error("root count does not match N*h");
    return rs;
}

long RootSystem::pairing(const IVec &a, const IVec &b) const {
    long s = 0;
    for (int i = 0; i < rank_; ++i) {
        if (a[i] == 0)
            continue;
        for (int j = 0; j < rank_; ++j)
            s += a[i] * cartan_[i][j] * b[j];
    }
    return s;
}

bool RootSystem::is_root(const IVec &a) const {
    return std::binary_search(roots_.begin(), roots_.end(), a);
}

IVec RootSystem::reflect(const IVec &alpha, const IVec &beta) const {
    if (!is_root(alpha))
        throw NotARoot();
    long p = pairing(alpha, beta);
    IVec r = beta;
    for (int i = 0; i < rank_; ++i)
        r[i] -= p * alpha[i];
    return r;
}

IVec RootSystem::simple_root(int i) const {
    IVec e(rank_, 0);
    e[i] = 1;
    return e;
}

std::vector<Rational> RootSystem::fundamental_weight(int i) const {
    Mat<Rational> g(rank_, std::vector<Rational>(rank_));
    for (int a = 0; a < rank_; ++a)
        for (int b = 0; b < rank_; ++b)
            g[a][b] = Rational(cartan_[a][b]);
    Mat<Rational> ginv = mat_inverse(g);
    std::vector<Rational> w(rank_);
    for (int a = 0; a < rank_; ++a)
        w[a] = ginv[a][i];
    return w;
}

std::string RootSystem::name() const {
    std::ostringstream os;
    os << type_ << rank_;
    return os.str();
}

IVec CoxeterElement::apply(const IVec &v) const {
    IVec r(v.size(), 0);
    for (size_t i = 0; i < matrix.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            r[i] += matrix[i][j] * v[j];
    return r;
}

std::vector<Rational> CoxeterElement::apply(const std::vector<Rational> &v) const {
    std::vector<Rational> r(v.size(), Rational(0));
    for (size_t i = 0; i < matrix.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            r[i] += Rational(matrix[i][j]) * v[j];
    return r;
}

CoxeterElement coxeter(const RootSystem &rs) {
    int n = rs.rank();
    CoxeterElement cox;
    // reflection r_i acts on coordinates as x |-> x - (alpha_i|x) e_i
    auto reflect_mat = [&](int i) {
        IMat m(n, IVec(n, 0));
        for (int a = 0; a < n; ++a)
            m[a][a] = 1;
        for (int j = 0; j < n; ++j)
            m[i][j] -= rs.cartan()[i][j];
        return m;
    };
    auto mul = [&](const IMat &a, const IMat &b) {
        IMat c(n, IVec(n, 0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (a[i][k] != 0)
                    for (int j = 0; j < n; ++j)
                        c[i][j] += a[i][k] * b[k][j];
        return c;
    };
    IMat m(n, IVec(n, 0));
    for (int i = 0; i < n; ++i)
        m[i][i] = 1;
    for (int i = 0; i < n; ++i) {
        cox.word.push_back(i);
        m = mul(m, reflect_mat(i));
    }
    cox.matrix = m;

    // order must be exactly h
    IMat p = m;
    unsigned ord = 1;
    auto is_id = [&](const IMat &x) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (x[i][j] != (i == j ? 1 : 0))
                    return false;
        return true;
    };
    while (!is_id(p)) {
        p = mul(p, m);
        ++ord;
        if (ord > 2 * rs.coxeter_number())
            throw std::logic_error("coxeter element order overflow");
    }
    if (ord != rs.coxeter_number())
        throw std::logic_error("coxeter element order != h");
    return cox;
}

SeifertData::SeifertData(const RootSystem &rs, const CoxeterElement &cox) {
    int n = rs.rank();
    Mat<Rational> one_minus_sigma(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            one_minus_sigma[i][j] = Rational((i == j ? 1 : 0) - cox.matrix[i][j]);
    Mat<Rational> minv = mat_inverse(one_minus_sigma);
    // L[i][j] = ((1-sigma)^{-1} e_i | e_j) = sum_k minv[k][i] G[k][j]
    Lmat_.assign(n, IVec(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational s(0);
            for (int k = 0; k < n; ++k)
                s += minv[k][i] * Rational(rs.gram()[k][j]);
            if (!s.is_integer())
                throw std::logic_error("Seifert form not integer valued");
            Lmat_[i][j] = s.num().get_si();
        }
}

long SeifertData::L(const IVec &a, const IVec &b) const {
    long s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0)
            continue;
        for (size_t j = 0; j < b.size(); ++j)
            s += a[i] * Lmat_[i][j] * b[j];
    }
    return s;
}

int SeifertData::epsilon(const IVec &a, const IVec &b) const {
    return (L(a, b) % 2 + 2) % 2 == 0 ? 1 : -1;
}

Cyclotomic b_scalar(const RootSystem &rs, const CoxeterElement &cox, const IVec &alpha,
                    const IVec &beta) {
    unsigned h = rs.coxeter_number();
    Cyclotomic b = Cyclotomic(Rational(1, (long)h)).pow(rs.pairing(alpha, beta));
    IVec sa = alpha;
    for (unsigned k = 1; k < h; ++k) {
        sa = cox.apply(sa);
        long e = rs.pairing(sa, beta);
        if (e != 0)
            b *= (Cyclotomic::one() - Cyclotomic::root_of_unity(h, (long)k)).pow(e);
    }
    return b;
}

EigenFrame::EigenFrame(const RootSystem &rs, const CoxeterElement &cox) {
    int n = rs.rank();
    unsigned h = rs.coxeter_number();
    field_order_ = h;

    // eigenvectors per exponent, over Q(zeta_h); the only repeated exponent
    // in ADE is h/2 (type D with N even), whose eigenvalue -1 is rational
    std::map<int, std::vector<std::vector<Cyclotomic>>> spaces;
    std::set<int> distinct(rs.exponents().begin(), rs.exponents().end());
    for (int m : distinct) {
        Mat<Cyclotomic> a(n, std::vector<Cyclotomic>(n));
        Cyclotomic ev = Cyclotomic::root_of_unity(h, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a[i][j] = Cyclotomic((long)cox.matrix[i][j]);
                if (i == j)
                    a[i][j] -= ev;
            }
        spaces[m] = kernel_basis(a, (size_t)n);
        size_t mult = (size_t)std::count(rs.exponents().begin(), rs.exponents().end(), m);
        if (spaces[m].size() != mult)
            throw std::logic_error("eigenspace dimension mismatch");
    }

    auto pair_raw = [&](const std::vector<Cyclotomic> &x, const std::vector<Cyclotomic> &y) {
        Cyclotomic s;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!x[i].is_zero() && !y[j].is_zero())
                    s += x[i] * Cyclotomic((long)rs.gram()[i][j]) * y[j];
        return s;
    };

    vectors_.assign((size_t)n, {});
    mj_.assign((size_t)n, 0);
    for (int j = 0; j < n; ++j)
        mj_[j] = rs.exponents()[j];

    std::set<int> done;
    for (int j = 0; j < n; ++j) {
        if (done.count(j))
            continue;
        int m = mj_[j];
        int jp = n - 1 - j;
        if (jp == j) {
            // middle vector, m = h/2: normalize (v|v) = 1 via an exact sqrt
            auto v = spaces[m][0];
            Cyclotomic c = pair_raw(v, v);
            if (!c.is_rational())
                throw std::logic_error("middle eigenvector norm not rational");
            Cyclotomic s = sqrt_rational(c.rational_value());
            field_order_ = (unsigned)std::lcm(field_order_, s.order());
            for (auto &x : v)
                x /= s;
            vectors_[(size_t)j] = v;
            done.insert(j);
        } else if (mj_[jp] == m) {
            // doubled exponent h/2: hyperbolic pair inside the eigenspace
            auto w1 = spaces[m][0], w2 = spaces[m][1];
            Cyclotomic a = pair_raw(w1, w1), bb = pair_raw(w1, w2), c = pair_raw(w2, w2);
            std::vector<Cyclotomic> u1, u2;
            if (a.is_zero()) {
                u1 = w1;
                u2 = w2;
            } else if (c.is_zero()) {
                u1 = w2;
                u2 = w1;
            } else {
                // roots of  a + 2 b t + c t^2 = 0,  u = w1 + t w2
                Cyclotomic disc = bb * bb - a * c;
                if (!disc.is_rational())
                    throw std::logic_error("hyperbolic pair discriminant not rational");
                Cyclotomic sd = sqrt_rational(disc.rational_value());
                field_order_ = (unsigned)std::lcm(field_order_, sd.order());
                Cyclotomic t1 = (-bb + sd) / c, t2 = (-bb - sd) / c;
                u1.resize((size_t)n);
                u2.resize((size_t)n);
                for (int i = 0; i < n; ++i) {
                    u1[(size_t)i] = w1[(size_t)i] + t1 * w2[(size_t)i];
                    u2[(size_t)i] = w1[(size_t)i] + t2 * w2[(size_t)i];
                }
            }
            Cyclotomic cross = pair_raw(u1, u2);
            if (cross.is_zero())
                throw std::logic_error("degenerate hyperbolic pair");
            for (auto &x : u2)
                x /= cross;
            vectors_[(size_t)j] = u1;
            vectors_[(size_t)jp] = u2;
            done.insert(j);
            done.insert(jp);
        } else {
            // distinct exponents: partner eigenspace carries the dual vector
            auto v = spaces[m][0];
            auto w = spaces[mj_[jp]][0];
            Cyclotomic cross = pair_raw(v, w);
            if (cross.is_zero())
                throw std::logic_error("eigenvector pairing degenerate");
            for (auto &x : w)
                x /= cross;
            vectors_[(size_t)j] = v;
            vectors_[(size_t)jp] = w;
            done.insert(j);
            done.insert(jp);
        }
    }

    gram_.assign((size_t)n, std::vector<Cyclotomic>((size_t)n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gram_[(size_t)i][(size_t)j] = Cyclotomic((long)rs.gram()[i][j]);

    // verify normalization (v_i|v_j) = delta_{i+j,N+1}
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cyclotomic p = pair_raw(vectors_[(size_t)i], vectors_[(size_t)j]);
            bool want_one = (i + j == n - 1);
            if (want_one && !(p == Cyclotomic::one()))
                throw std::logic_error("frame pairing normalization failed");
            if (!want_one && !p.is_zero())
                throw std::logic_error("frame pairing orthogonality failed");
        }

    // dual coordinates: x = sum_j (x | v_{partner(j)}) v_j
    dual_coeff_.assign((size_t)n, std::vector<Cyclotomic>((size_t)n));
    for (int j = 0; j < n; ++j) {
        const auto &vp = vectors_[(size_t)partner(j)];
        for (int i = 0; i < n; ++i) {
            Cyclotomic s;
            for (int k = 0; k < n; ++k)
                s += gram_[(size_t)i][(size_t)k] * vp[(size_t)k];
            dual_coeff_[(size_t)j][(size_t)i] = s;
        }
    }
}

Cyclotomic EigenFrame::pair(const std::vector<Cyclotomic> &x,
                            const std::vector<Cyclotomic> &y) const {
    Cyclotomic s;
    size_t n = vectors_.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!x[i].is_zero() && !y[j].is_zero())
                s += x[i] * gram_[i][j] * y[j];
    return s;
}

std::vector<Cyclotomic> EigenFrame::frame_coordinates(const std::vector<Cyclotomic> &x) const {
    size_t n = vectors_.size();
    std::vector<Cyclotomic> c(n);
    for (size_t j = 0; j < n; ++j) {
        Cyclotomic s;
        for (size_t i = 0; i < n; ++i)
            if (!x[i].is_zero())
                s += dual_coeff_[j][i] * x[i];
        c[j] = s;
    }
    return c;
}

} // namespace walg
