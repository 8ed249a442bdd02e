#include "kleinkit/klein.hpp"

#include <algorithm>

namespace kleinkit {

DressingMap DressingMap::identity(std::size_t n) {
  DressingMap m;
  m.name = "identity";
  m.modes.assign(n, ModeDressing{UnitScalar::one(), PhaseVector(n)});
  return m;
}

const std::vector<CatalogEntry>& map_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"total-parity-on-b", "2 modes: b -> eta b with eta = (-1)^(N_a+N_b) (q^(N_a+N_b) for formal q)"},
      {"eta-b-on-both", "2 modes: a -> eta_b a, b -> eta_b b"},
      {"eta-a-on-b", "2 modes: b -> eta_a b"},
      {"cascade", "n modes: a_i -> eta_1 ... eta_{i-1} a_i"},
      {"q-total-on-b", "2 modes: b -> q^(N_a+N_b) b"},
      {"q-etab-on-both", "2 modes: a -> q^N_b a, b -> q^N_b b"},
      {"q-cascade", "n modes: a_i -> q^(N_1+...+N_{i-1}) a_i"},
      {"total-parity-on-primed", "4 fermion modes (a,b,a',b'): primed -> (-1)^N primed"},
      {"charge-parity", "4 fermion modes (a,b,a',b'): primed -> e^(i pi Q) primed, Q = -N_a+N_b-N_a'+N_b'"},
  };
  return catalog;
}

namespace {

void require_modes(std::string_view name, const AlgebraSpec& spec, std::size_t n) {
  if (spec.size() != n) {
    throw MapError("map '" + std::string(name) + "' needs " + std::to_string(n) + " modes, spec has " +
                   std::to_string(spec.size()));
  }
}

void require_fermions(std::string_view name, const AlgebraSpec& spec) {
  for (const auto& m : spec.modes()) {
    if (m.statistics != Statistics::fermion) {
      throw MapError("map '" + std::string(name) + "' needs fermionic modes, '" + m.name + "' is a boson");
    }
  }
}

} // namespace

DressingMap standard_map(std::string_view name, const AlgebraSpec& spec) {
  const std::size_t n = spec.size();
  DressingMap map = DressingMap::identity(n);
  map.name = std::string(name);

  if (name == "total-parity-on-b" || name == "q-total-on-b") {
    require_modes(name, spec, 2);
    map.modes[1].phase = {1, 1};
  } else if (name == "eta-b-on-both" || name == "q-etab-on-both") {
    require_modes(name, spec, 2);
    map.modes[0].phase = {0, 1};
    map.modes[1].phase = {0, 1};
  } else if (name == "eta-a-on-b") {
    require_modes(name, spec, 2);
    map.modes[1].phase = {1, 0};
  } else if (name == "cascade" || name == "q-cascade") {
    if (n == 0) {
      throw MapError("map '" + std::string(name) + "' needs at least one mode");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        map.modes[i].phase[k] = 1;
      }
    }
  } else if (name == "total-parity-on-primed") {
    require_modes(name, spec, 4);
    require_fermions(name, spec);
    map.modes[2].phase = {1, 1, 1, 1};
    map.modes[3].phase = {1, 1, 1, 1};
  } else if (name == "charge-parity") {
    require_modes(name, spec, 4);
    require_fermions(name, spec);
    map.modes[2].phase = {-1, 1, -1, 1};
    map.modes[3].phase = {-1, 1, -1, 1};
  } else {
    throw MapError("unknown map '" + std::string(name) + "'");
  }
  return map;
}

OpExpr dressed_annihilator(const DressingMap& map, std::size_t i) {
  const auto& d = map.modes.at(i);
  return OpExpr::word({Letter::phase_of(d.phase), Letter::ann(i)}, d.scale);
}

OpExpr apply_dressing(const DressingMap& map, const OpExpr& e, const AlgebraSpec& spec) {
  if (map.size() != spec.size()) {
    throw MapError("dressing has " + std::to_string(map.size()) + " modes, spec has " +
                   std::to_string(spec.size()));
  }
  Assignment assignment;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.modes[i].scale.is_unit_monomial()) {
      throw MapError("dressing scale must have unit modulus");
    }
    assignment.emplace(Generator{i, false}, dressed_annihilator(map, i));
  }
  return substitute(e, assignment, spec);
}

DressingMap compose(const DressingMap& first, const DressingMap& second) {
  if (first.size() != second.size()) {
    throw MapError("cannot compose dressings of different size");
  }
  DressingMap out;
  out.name = first.name + "*" + second.name;
  for (std::size_t i = 0; i < first.size(); ++i) {
    out.modes.push_back({first.modes[i].scale * second.modes[i].scale,
                         first.modes[i].phase + second.modes[i].phase});
  }
  return out;
}

ExchangeMatrix induced_exchange(const DressingMap& map, const ExchangeMatrix& exchange, const QMode& q) {
  const std::size_t n = exchange.size();
  if (map.size() != n) {
    throw MapError("dressing and exchange matrix dimensions differ");
  }
  ExchangeMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t shift = checked_add(map.modes[j].phase[i], checked_mul(map.modes[i].phase[j], -1));
      UnitScalar v = exchange(i, j) * UnitScalar::q(shift);
      if (!q.is_formal()) {
        v = v.substitute(q.value());
      }
      out.set(i, j, v);
    }
  }
  return out;
}

bool ExchangeReport::all_pass() const {
  return failures() == 0;
}

std::size_t ExchangeReport::failures() const {
  auto failed = [](const RelationCheck& c) { return !c.pass; };
  return static_cast<std::size_t>(std::count_if(same_mode.begin(), same_mode.end(), failed) +
                                  std::count_if(pairs.begin(), pairs.end(), failed));
}

ExchangeReport verify_klein(const DressingMap& map, const AlgebraSpec& spec, const ExchangeMatrix& expected) {
  const std::size_t n = spec.size();
  if (map.size() != n || expected.size() != n) {
    throw MapError("dressing, exchange matrix and spec dimensions differ");
  }
  std::vector<OpExpr> ann(n), cre(n), num(n);
  for (std::size_t i = 0; i < n; ++i) {
    ann[i] = normal_order(dressed_annihilator(map, i), spec);
    cre[i] = adjoint(ann[i], spec);
    num[i] = multiply(cre[i], ann[i], spec);
  }

  ExchangeReport report;
  report.expected = expected;
  report.induced = induced_exchange(map, spec.exchange_matrix(), spec.qmode());

  auto record = [&](std::vector<RelationCheck>& into, std::string relation, std::size_t i, std::size_t j,
                    OpExpr residual) {
    const bool pass = residual.empty();
    into.push_back({std::move(relation), i, j, std::move(residual), pass});
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (spec.is_fermion(i)) {
      record(report.same_mode, "{a,a+} = 1", i, i,
             bracket(ann[i], cre[i], UnitScalar(-1), spec) - OpExpr::identity());
      record(report.same_mode, "a a = 0", i, i, multiply(ann[i], ann[i], spec));
    } else {
      record(report.same_mode, "[a,a+] = 1", i, i,
             bracket(ann[i], cre[i], UnitScalar(1), spec) - OpExpr::identity());
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const UnitScalar e = spec.normalize(expected(i, j));
      record(report.pairs, "a_i a_j = Q a_j a_i", i, j, bracket(ann[i], ann[j], e, spec));
      record(report.pairs, "a_i a_j+ = Q^-1 a_j+ a_i", i, j, bracket(ann[i], cre[j], e.inverse(), spec));
      record(report.pairs, "[N_i,N_j] = 0", i, j, bracket(num[i], num[j], UnitScalar(1), spec));
    }
  }
  return report;
}

} // namespace kleinkit
