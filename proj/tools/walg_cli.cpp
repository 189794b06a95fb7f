// Batch front end for the lattice W-algebra kernel: JSON in, JSON out.
#include "walg/acceptance.hpp"
#include "walg/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace walg;

namespace {

long truncation_weight() {
    if (const char *env = std::getenv("WALG_TRUNCATION_WEIGHT"))
        return std::atol(env);
    return 12;
}

std::pair<char, int> parse_type(const std::string &name) {
    if (name.size() < 2)
        throw CLI::ValidationError("type", "expected e.g. A2, D4, E6");
    return {name[0], std::atoi(name.c_str() + 1)};
}

json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw CLI::ValidationError("file", "cannot open " + path);
    json j;
    in >> j;
    return j;
}

LatticeState build_element(const VertexAlgebra &va, const std::string &element, int d) {
    if (element == "omega")
        return va.build_omega();
    if (element == "omega-d")
        return va.build_omega_d(d);
    if (element == "nu")
        return va.build_nu_d(va.default_lambda0(), d);
    if (element == "pi")
        return va.build_pi_n();
    throw CLI::ValidationError("element", "unknown element " + element);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"exact kernel for ADE lattice W-algebras and twisted Fock modules"};
    app.require_subcommand(1);

    std::string type_name = "A2", a_path, b_path, state_path, element = "omega", out_path;
    std::string m_range = "-1..5", rescale;
    int nth = 0, d = 1, kmax = 6;
    long genus = 2, deg = 8;
    double wmin = -8, wmax = 8;
    IVec alpha;

    auto *roots_cmd = app.add_subcommand("roots", "dump a root system as JSON");
    roots_cmd->add_option("type", type_name, "root system, e.g. A2")->required();

    auto *product_cmd = app.add_subcommand("product", "n-th product of two states");
    product_cmd->add_option("--type", type_name)->required();
    product_cmd->add_option("--a", a_path, "state JSON file")->required();
    product_cmd->add_option("--b", b_path, "state JSON file")->required();
    product_cmd->add_option("--n", nth)->required();

    auto *screen_cmd = app.add_subcommand("screen", "apply a screening operator");
    screen_cmd->add_option("--type", type_name)->required();
    screen_cmd->add_option("--alpha", alpha, "root in simple-root coordinates")->required();
    screen_cmd->add_option("--state", state_path, "state JSON file")->required();

    auto *walg_cmd = app.add_subcommand("walg-check", "screening-kernel membership");
    walg_cmd->add_option("--type", type_name)->required();
    walg_cmd->add_option("--element", element, "omega | omega-d | nu | pi");
    walg_cmd->add_option("--d", d);

    auto *vir_cmd = app.add_subcommand("virasoro-check", "Virasoro bracket on V_Q");
    vir_cmd->add_option("--type", type_name)->required();
    int vir_mmax = 2;
    long vir_wmax = 3;
    vir_cmd->add_option("--m-max", vir_mmax);
    vir_cmd->add_option("--w-max", vir_wmax);

    auto *tf_cmd = app.add_subcommand("twisted-field", "dump a twisted field operator");
    tf_cmd->add_option("--type", type_name)->required();
    tf_cmd->add_option("--element", element);
    tf_cmd->add_option("--d", d);
    tf_cmd->add_option("--window-min", wmin);
    tf_cmd->add_option("--window-max", wmax);
    tf_cmd->add_option("--kmax", kmax);

    auto *wk_cmd = app.add_subcommand("wk", "dump the correlator table");
    wk_cmd->add_option("--genus", genus)->required();
    wk_cmd->add_option("--deg", deg)->required();
    wk_cmd->add_option("--out", out_path);

    auto *con_cmd = app.add_subcommand("constraints", "Virasoro annihilation check");
    con_cmd->add_option("--m-range", m_range, "e.g. -1..5");
    con_cmd->add_option("--genus", genus);
    con_cmd->add_option("--deg", deg);
    con_cmd->add_option("--rescale", rescale, "rational p/q");

    auto *acc_cmd = app.add_subcommand("acceptance", "run the full acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (roots_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            std::cout << to_json(RootSystem::build(t, n)).dump(2) << std::endl;
            return 0;
        }
        if (product_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            VertexAlgebra va(t, n, truncation_weight());
            LatticeState a = state_from_json(load_json(a_path));
            LatticeState b = state_from_json(load_json(b_path));
            std::cout << to_json(va.nth_product(a, b, nth)).dump(2) << std::endl;
            return 0;
        }
        if (screen_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            VertexAlgebra va(t, n, truncation_weight());
            LatticeState a = state_from_json(load_json(state_path));
            std::cout << to_json(va.screening(alpha, a)).dump(2) << std::endl;
            return 0;
        }
        if (walg_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            VertexAlgebra va(t, n, truncation_weight());
            bool member = va.in_w_algebra(build_element(va, element, d));
            std::cout << json{{"member", member}}.dump() << std::endl;
            return member ? 0 : 1;
        }
        if (vir_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            VertexAlgebra va(t, n, truncation_weight());
            auto omega = va.build_omega();
            auto basis = va.weight_basis(vir_wmax);
            for (int m = -vir_mmax; m <= vir_mmax; ++m)
                for (int nn = -vir_mmax; nn < m; ++nn)
                    for (const auto &key : basis) {
                        LatticeState x;
                        x.add_term(key, Cyclotomic::one());
                        auto lhs = va.virasoro_mode(omega, m, va.virasoro_mode(omega, nn, x)) -
                                   va.virasoro_mode(omega, nn, va.virasoro_mode(omega, m, x));
                        auto rhs = va.virasoro_mode(omega, m + nn, x) *
                                   Cyclotomic((long)(m - nn));
                        if (m + nn == 0)
                            rhs += x * Cyclotomic(Rational(((long)m * m * m - m) * n, 12));
                        if (!(lhs == rhs)) {
                            std::cout << json{{"holds", false}}.dump() << std::endl;
                            return 1;
                        }
                    }
            std::cout << json{{"holds", true}}.dump() << std::endl;
            return 0;
        }
        if (tf_cmd->parsed()) {
            auto [t, n] = parse_type(type_name);
            VertexAlgebra va(t, n, truncation_weight());
            TwistedModule tm(va);
            LaurentWindow w{Rational((long)wmin), Rational((long)wmax)};
            auto op = tm.twisted_field(build_element(va, element, d), w, kmax);
            std::cout << to_json(op).dump(2) << std::endl;
            return 0;
        }
        if (wk_cmd->parsed()) {
            auto table = dvv_oracle(genus, deg);
            json j = correlator_table_json(table);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                out << j.dump(2) << std::endl;
            } else {
                std::cout << j.dump(2) << std::endl;
            }
            return 0;
        }
        if (con_cmd->parsed()) {
            auto dots = m_range.find("..");
            if (dots == std::string::npos)
                throw CLI::ValidationError("m-range", "expected lo..hi");
            int mlo = std::atoi(m_range.substr(0, dots).c_str());
            int mhi = std::atoi(m_range.substr(dots + 2).c_str());
            std::optional<Rational> delta;
            if (!rescale.empty()) {
                auto slash = rescale.find('/');
                long num = std::atol(rescale.substr(0, slash).c_str());
                long den = slash == std::string::npos
                               ? 1
                               : std::atol(rescale.substr(slash + 1).c_str());
                delta = Rational(num, den);
            }
            auto table = dvv_oracle(genus, deg);
            auto report = check_annihilation(table, mlo, mhi, genus, deg, delta);
            std::cout << to_json(report).dump(2) << std::endl;
            return report.all_zero ? 0 : 1;
        }
        if (acc_cmd->parsed()) {
            auto results = run_acceptance(std::cout);
            return all_passed(results) ? 0 : 1;
        }
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::runtime_error &e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
