#pragma once

#include "walg/a1_suite.hpp"
#include "walg/lattice_va.hpp"
#include "walg/twisted_fock.hpp"

#include <json.hpp>

namespace walg {

using nlohmann::json;

json to_json(const Rational &r);
Rational rational_from_json(const json &j);

json to_json(const Cyclotomic &c);
Cyclotomic cyclotomic_from_json(const json &j);

json to_json(const RootSystem &rs);

json to_json(const LatticeState &s);
LatticeState state_from_json(const json &j);

json to_json(const NormalOrderedOperator &op);
NormalOrderedOperator operator_from_json(const json &j);

json to_json(const AnnihilationReport &report);

json correlator_table_json(const CorrelatorTable &table);

} // namespace walg
