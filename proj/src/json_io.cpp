#include "walg/json_io.hpp"

#include <functional>

namespace walg {

json to_json(const Rational &r) {
    return json::array({r.num().get_str(), r.den().get_str()});
}

Rational rational_from_json(const json &j) {
    return Rational::from_parts(mpz_class(j.at(0).get<std::string>()),
                                mpz_class(j.at(1).get<std::string>()));
}

json to_json(const Cyclotomic &c) {
    Cyclotomic r = c.reduced_order();
    json coeffs = json::array();
    for (const auto &x : r.coeffs())
        coeffs.push_back(to_json(x));
    return json{{"order", r.order()}, {"coeffs", coeffs}};
}

Cyclotomic cyclotomic_from_json(const json &j) {
    unsigned order = j.at("order").get<unsigned>();
    std::vector<Rational> coeffs;
    for (const auto &e : j.at("coeffs"))
        coeffs.push_back(rational_from_json(e));
    return Cyclotomic(order, std::move(coeffs));
}

json to_json(const RootSystem &rs) {
    json roots = json::array();
    for (const auto &r : rs.roots())
        roots.push_back(r);
    return json{{"type", std::string(1, rs.type())},
                {"rank", rs.rank()},
                {"h", rs.coxeter_number()},
                {"exponents", rs.exponents()},
                {"cartan", rs.cartan()},
                {"roots", roots}};
}

json to_json(const LatticeState &s) {
    json terms = json::array();
    for (const auto &[key, c] : s.terms()) {
        json mono = json::array();
        for (auto &[n, i] : key.mono.factors)
            mono.push_back(json::array({i, n}));
        terms.push_back(json{{"monomial", mono}, {"lattice", key.gamma}, {"coeff", to_json(c)}});
    }
    return json{{"terms", terms}};
}

LatticeState state_from_json(const json &j) {
    LatticeState s;
    for (const auto &t : j.at("terms")) {
        FockMonomial mono;
        for (const auto &f : t.at("monomial"))
            mono.factors.emplace_back(f.at(1).get<int>(), f.at(0).get<int>());
        std::sort(mono.factors.begin(), mono.factors.end());
        IVec gamma = t.at("lattice").get<IVec>();
        s.add_term(StateKey{std::move(mono), std::move(gamma)},
                   cyclotomic_from_json(t.at("coeff")));
    }
    return s;
}

namespace {

json multi_index_json(const MultiIndex &m) {
    json out = json::array();
    for (auto &[v, e] : m)
        out.push_back(json::array({v.j, v.k, e}));
    return out;
}

MultiIndex multi_index_from_json(const json &j) {
    MultiIndex m;
    for (const auto &e : j)
        m.emplace_back(VarId{e.at(0).get<int>(), e.at(1).get<int>()}, e.at(2).get<int>());
    std::sort(m.begin(), m.end());
    return m;
}

} // namespace

json to_json(const NormalOrderedOperator &op) {
    json terms = json::array();
    for (const auto &[key, c] : op.terms()) {
        terms.push_back(json{{"I", multi_index_json(key.q)},
                             {"J", multi_index_json(key.dq)},
                             {"hbar_half", NormalOrderedOperator::hbar_half(key)},
                             {"lambda_pow", json::array({key.lambda.num().get_str(),
                                                         key.lambda.den().get_str()})},
                             {"coeff", to_json(c)}});
    }
    return json{{"terms", terms}};
}

NormalOrderedOperator operator_from_json(const json &j) {
    NormalOrderedOperator op;
    for (const auto &t : j.at("terms")) {
        NormalOrderedOperator::Key key;
        key.q = multi_index_from_json(t.at("I"));
        key.dq = multi_index_from_json(t.at("J"));
        key.lambda = rational_from_json(t.at("lambda_pow"));
        op.add_term(key, cyclotomic_from_json(t.at("coeff")));
    }
    return op;
}

json to_json(const AnnihilationReport &report) {
    json residuals = json::array();
    for (const auto &r : report.residuals) {
        json mono = json::array();
        for (auto &[v, e] : r.mono)
            mono.push_back(json::array({v.j, v.k, e}));
        residuals.push_back(json{{"m", r.m},
                                 {"genus", r.genus},
                                 {"monomial", mono},
                                 {"value", to_json(r.value)}});
    }
    return json{
        {"all_zero", report.all_zero}, {"checked", report.checked}, {"residuals", residuals}};
}

json correlator_table_json(const CorrelatorTable &table) {
    json entries = json::array();
    for (long g = 0; g <= table.genus_max(); ++g) {
        for (long w = 0; w <= table.weight_max(); ++w) {
            long n = w - 3 * g + 3;
            if (n < 1 || (g == 0 && n < 3))
                continue;
            std::vector<int> ks;
            std::function<void(long, long, int)> rec = [&](long left, long slots, int minv) {
                if (slots == 0) {
                    if (left != 0)
                        return;
                    Rational v = table.get(g, ks);
                    if (!v.is_zero())
                        entries.push_back(json{{"genus", g}, {"ks", ks}, {"value", to_json(v)}});
                    return;
                }
                for (int x = minv; x <= left; ++x) {
                    ks.push_back(x);
                    rec(left - x, slots - 1, x);
                    ks.pop_back();
                }
            };
            rec(w, n, 0);
        }
    }
    return json{{"genus_max", table.genus_max()},
                {"weight_max", table.weight_max()},
                {"correlators", entries}};
}

} // namespace walg
