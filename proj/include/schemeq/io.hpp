#pragma once
// JSON and CSV forms of the library types. JSON numbers are written in
// shortest round-trip form; CSV uses %.17g.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "schemeq/characters.hpp"
#include "schemeq/entangled.hpp"
#include "schemeq/ifs.hpp"
#include "schemeq/qmc.hpp"
#include "schemeq/spectral.hpp"

namespace schemeq::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Primitives

inline std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

inline Json int_matrix_json(const IntMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline double unsigned_zero(double x) { return x == 0.0 ? 0.0 : x; }

inline Json real_matrix_json(const RealMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(unsigned_zero(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json complex_json(cplx z) { return Json::array({unsigned_zero(z.real()), unsigned_zero(z.imag())}); }

inline Json complex_matrix_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json vector_json(const RealVector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(unsigned_zero(v(k)));
  return out;
}

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw Error("input", what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline const Json& rows_of(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of rows");
  for (const auto& row : j)
    if (!row.is_array() || row.size() != j.front().size()) bad(std::string(what) + " has ragged rows");
  return j;
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be numeric");
  return j.get<double>();
}

inline std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace detail

inline IntMatrix int_matrix_from_json(const Json& j, const char* what = "matrix") {
  detail::rows_of(j, what);
  const Index r = j.size(), c = r ? j.front().size() : 0;
  IntMatrix m(r, c);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < c; ++b) m(a, b) = detail::integer(j[a][b], what);
  return m;
}

inline RealMatrix real_matrix_from_json(const Json& j, const char* what = "matrix") {
  detail::rows_of(j, what);
  const Index r = j.size(), c = r ? j.front().size() : 0;
  RealMatrix m(r, c);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < c; ++b) m(a, b) = detail::number(j[a][b], what);
  return m;
}

/// Entries are [re, im] pairs or plain reals.
inline ComplexMatrix complex_matrix_from_json(const Json& j, const char* what = "matrix") {
  detail::rows_of(j, what);
  const Index r = j.size(), c = r ? j.front().size() : 0;
  ComplexMatrix m(r, c);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < c; ++b) {
      const Json& e = j[a][b];
      if (e.is_array()) {
        if (e.size() != 2) detail::bad(std::string(what) + " entries must be [re, im]");
        m(a, b) = cplx(detail::number(e[0], what), detail::number(e[1], what));
      } else {
        m(a, b) = detail::number(e, what);
      }
    }
  return m;
}

inline std::vector<double> doubles_from_json(const Json& j, const char* what) {
  if (!j.is_array()) detail::bad(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(detail::number(e, what));
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("input", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("input", path + ": " + e.what());
  }
}

inline Json tolerances_json(const Tolerances& t) {
  return {{"eig", t.eig}, {"zero", t.zero}, {"num", t.num}, {"gs", t.gs}};
}

// ---------------------------------------------------------------------------
// Schemes and groups

inline Json scheme_to_json(const AssociationScheme& s) {
  Json classes = Json::array();
  for (const auto& A : s.classes) classes.push_back(int_matrix_json(A));
  return {{"type", "association-scheme"},
          {"n", s.n},
          {"labels", s.labels},
          {"transpose_map", s.transpose_map},
          {"commutative", s.commutative},
          {"classes", std::move(classes)}};
}

/// Reads "classes" (0/1 matrices) or "relation" (a class-index matrix). The
/// result is not axiom-checked, so damaged files can be handed to
/// verify_axioms.
inline AssociationScheme scheme_from_json(const Json& j) {
  AssociationScheme s;
  if (j.contains("classes")) {
    for (const auto& c : detail::field(j, "classes")) s.classes.push_back(int_matrix_from_json(c, "class"));
  } else {
    const IntMatrix rel = int_matrix_from_json(detail::field(j, "relation"), "relation");
    const Index r = rel.size() ? rel.maxCoeff() + 1 : 0;
    for (Index i = 0; i < r; ++i) s.classes.push_back((rel.array() == i).cast<std::int64_t>());
  }
  if (s.classes.empty()) detail::bad("a scheme needs at least one class");
  s.n = s.classes.front().rows();
  for (const auto& A : s.classes)
    if (A.rows() != s.n || A.cols() != s.n) detail::bad("classes must all be n x n");
  if (j.contains("n") && detail::integer(j.at("n"), "n") != s.n) detail::bad("\"n\" disagrees with the classes");
  const Index r = s.rank();
  if (j.contains("labels")) {
    s.labels = j.at("labels").get<std::vector<std::string>>();
    if (static_cast<Index>(s.labels.size()) != r) detail::bad("one label per class expected");
  } else {
    for (Index i = 0; i < r; ++i) s.labels.push_back("A" + std::to_string(i));
  }
  if (j.contains("transpose_map")) {
    s.transpose_map = j.at("transpose_map").get<std::vector<Index>>();
    if (static_cast<Index>(s.transpose_map.size()) != r) detail::bad("one transpose entry per class expected");
    for (Index t : s.transpose_map)
      if (t < 0 || t >= r) detail::bad("transpose_map entry out of range");
  } else {
    for (Index i = 0; i < r; ++i) {
      Index t = i;
      for (Index k = 0; k < r; ++k)
        if (s.classes[k] == s.classes[i].transpose()) t = k;
      s.transpose_map.push_back(t);
    }
  }
  if (j.contains("commutative")) {
    s.commutative = j.at("commutative").get<bool>();
  } else {
    s.commutative = schemeq::detail::products_commute(s.classes);
  }
  return s;
}

/// {"mul": [[...]]} or {"builtin": "C<n>" | "S<n>" | "Q8"}.
inline GroupTable group_from_json(const Json& j) {
  if (j.contains("builtin")) {
    const std::string b = j.at("builtin").get<std::string>();
    if (b == "Q8") return quaternion_group();
    if (b.size() >= 2 && (b[0] == 'C' || b[0] == 'S')) {
      const Index k = std::stol(b.substr(1));
      return b[0] == 'C' ? cyclic_group(k) : symmetric_group(k);
    }
    detail::bad("unknown builtin group " + b);
  }
  const IntMatrix m = int_matrix_from_json(detail::field(j, "mul"), "mul");
  std::vector<std::vector<Index>> mul(m.rows(), std::vector<Index>(m.cols()));
  for (Index a = 0; a < m.rows(); ++a)
    for (Index b = 0; b < m.cols(); ++b) mul[a][b] = m(a, b);
  return make_group_table(std::move(mul));
}

inline Json group_to_json(const GroupTable& g) {
  Json mul = Json::array();
  for (const auto& row : g.mul) mul.push_back(row);
  return {{"type", "group-table"}, {"order", g.order}, {"identity", g.identity}, {"mul", std::move(mul)}};
}

inline CharacterTable character_table_from_json(const Json& j) {
  CharacterTable ct;
  ct.class_sizes = detail::field(j, "class_sizes").get<std::vector<std::int64_t>>();
  for (const auto& row : detail::field(j, "chars")) {
    std::vector<cplx> r;
    for (const auto& e : row) {
      if (e.is_array()) r.emplace_back(detail::number(e.at(0), "chars"), detail::number(e.at(1), "chars"));
      else r.emplace_back(detail::number(e, "chars"), 0.0);
    }
    ct.chars.push_back(std::move(r));
  }
  return ct;
}

inline Json character_table_to_json(const CharacterTable& ct) {
  Json chars = Json::array();
  for (const auto& row : ct.chars) {
    Json r = Json::array();
    for (cplx z : row) r.push_back(complex_json(z));
    chars.push_back(std::move(r));
  }
  return {{"type", "character-table"}, {"class_sizes", ct.class_sizes}, {"chars", std::move(chars)}};
}

// ---------------------------------------------------------------------------
// Tensors

inline Json intersection_to_json(const IntersectionTensor& p) {
  Json vals = Json::array();
  for (Index k = 0; k < p.rank; ++k) {
    Json mk = Json::array();
    for (Index i = 0; i < p.rank; ++i) {
      Json row = Json::array();
      for (Index j = 0; j < p.rank; ++j) row.push_back(p(k, i, j));
      mk.push_back(std::move(row));
    }
    vals.push_back(std::move(mk));
  }
  return {{"type", "intersection-numbers"}, {"index", "p[k][i][j]"}, {"rank", p.rank}, {"valency", p.valency},
          {"values", std::move(vals)}};
}

inline Json real_tensor_json(const std::string& type, const std::string& index, Index rank,
                             const std::vector<double>& flat, const Tolerances& tol) {
  Json vals = Json::array();
  for (Index a = 0; a < rank; ++a) {
    Json ma = Json::array();
    for (Index b = 0; b < rank; ++b) {
      Json row = Json::array();
      for (Index c = 0; c < rank; ++c) row.push_back(unsigned_zero(flat[(a * rank + b) * rank + c]));
      ma.push_back(std::move(row));
    }
    vals.push_back(std::move(ma));
  }
  return {{"type", type}, {"index", index}, {"rank", rank}, {"values", std::move(vals)},
          {"tolerances", tolerances_json(tol)}};
}

inline Json krein_to_json(const KreinTensor& q, const Tolerances& tol) {
  return real_tensor_json("krein-parameters", "q[k][i][j]", q.rank, q.q, tol);
}

inline Json hypergroup_to_json(const HypergroupTensor& h, const Tolerances& tol) {
  return real_tensor_json("hypergroup", "h[i][j][k]", h.rank, h.h, tol);
}

/// One line per entry: "a,b,c,value" under the given header.
/// One row per (i,j), columns <symbol>0..<symbol>d over the remaining index.
template <class At>
std::string tensor_csv(const std::string& symbol, Index rank, At&& at) {
  std::string out = "i,j";
  for (Index k = 0; k < rank; ++k) out += "," + symbol + std::to_string(k);
  out += "\n";
  for (Index i = 0; i < rank; ++i)
    for (Index j = 0; j < rank; ++j) {
      out += std::to_string(i) + "," + std::to_string(j);
      for (Index k = 0; k < rank; ++k) out += "," + fmt17(static_cast<double>(at(i, j, k)));
      out += "\n";
    }
  return out;
}

inline Json spectral_to_json(const SpectralData& sd, const Tolerances& tol) {
  Json E = Json::array();
  for (const auto& M : sd.E) E.push_back(complex_matrix_json(M));
  return {{"type", "primitive-idempotents"},
          {"n", sd.n},
          {"multiplicities", sd.m},
          {"conjugate", sd.conjugate},
          {"eigenmatrix", complex_matrix_json(sd.eigenmatrix)},
          {"idempotents", std::move(E)},
          {"tolerances", tolerances_json(tol)}};
}

// ---------------------------------------------------------------------------
// Markov chains

inline Json transition_operator_to_json(const TransitionOperator& T, const ChoiReport& rep) {
  return {{"type", "transition-operator"},
          {"weights", T.weights},
          {"multiplier", complex_matrix_json(T.S)},
          {"choi",
           {{"mode", rep.mode},
            {"dimension", rep.dimension},
            {"min_eigenvalue", rep.min_eigenvalue},
            {"hermitian_defect", rep.hermitian_defect},
            {"completely_positive", rep.completely_positive}}}};
}

/// Chain files are {"p0": [...], "t": [[...]]}.
inline Json chain_to_json(const RealMatrix& t, const RealVector& p0) {
  return {{"p0", vector_json(p0)}, {"t", real_matrix_json(t)}};
}

inline std::pair<RealMatrix, RealVector> chain_from_json(const Json& j) {
  const RealMatrix t = real_matrix_from_json(detail::field(j, "t"), "t");
  const auto p = doubles_from_json(detail::field(j, "p0"), "p0");
  return {t, Eigen::Map<const RealVector>(p.data(), static_cast<Index>(p.size()))};
}

inline std::string trajectory_csv(const std::vector<RealVector>& traj) {
  std::string out = "step";
  const Index r = traj.empty() ? 0 : traj.front().size();
  for (Index k = 0; k < r; ++k) out += ",state" + std::to_string(k);
  out += "\n";
  for (size_t s = 0; s < traj.size(); ++s) {
    out += std::to_string(s);
    for (Index k = 0; k < r; ++k) out += "," + fmt17(traj[s](k));
    out += "\n";
  }
  return out;
}

/// Observable files are {"sites": k, "matrix": M} for a window observable or
/// {"factors": [M_0, ..., M_k]} for a product over sites 0..k.
struct ObservableInput {
  Index sites = 0;
  ComplexMatrix matrix;
  std::vector<ComplexMatrix> factors;  // empty unless given as a product
};

inline ObservableInput observable_from_json(const Json& j) {
  ObservableInput o;
  if (j.contains("factors")) {
    o.matrix = ComplexMatrix::Identity(1, 1);
    for (const auto& f : j.at("factors")) {
      o.factors.push_back(complex_matrix_from_json(f, "factor"));
      o.matrix = kron(o.matrix, o.factors.back());
    }
    o.sites = static_cast<Index>(o.factors.size());
    if (o.sites == 0) detail::bad("\"factors\" is empty");
  } else {
    o.matrix = complex_matrix_from_json(detail::field(j, "matrix"), "matrix");
    o.sites = detail::integer(detail::field(j, "sites"), "sites");
  }
  return o;
}

// ---------------------------------------------------------------------------
// Graphs and Fock spaces

inline Graph graph_from_json(const Json& j) {
  const Index n = detail::integer(detail::field(j, "n"), "n");
  std::vector<std::pair<Index, Index>> edges;
  for (const auto& e : detail::field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) detail::bad("edges must be [x, y] pairs");
    edges.emplace_back(detail::integer(e[0], "edge"), detail::integer(e[1], "edge"));
  }
  return graph_from_edges(n, edges);
}

inline Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (Index x = 0; x < g.n; ++x)
    for (Index y = x + 1; y < g.n; ++y)
      if (g.adj(x, y)) edges.push_back({x, y});
  return {{"n", g.n}, {"edges", std::move(edges)}};
}

inline Json jacobi_to_json(const JacobiData& jd) {
  return {{"omega", jd.omega}, {"alpha", jd.alpha}, {"closed", jd.closed}};
}

inline Json multimode_to_json(const MultiModeIFS& mm) {
  Json modes = Json::array();
  for (size_t j = 0; j < mm.modes.size(); ++j)
    modes.push_back({{"mode", mm.modes[j]},
                     {"operator", real_matrix_json(mm.X[j])},
                     {"creation", real_matrix_json(mm.aplus[j])},
                     {"preservation", real_matrix_json(mm.azero[j])},
                     {"annihilation", real_matrix_json(mm.aminus[j])}});
  return {{"type", "multimode-ifs"},
          {"coordinates", "u_i = A_i / sqrt(n v_i)"},
          {"rank", mm.rank},
          {"valency", mm.valency},
          {"levels", mm.levels},
          {"level_of_basis_vector", mm.level},
          {"basis", real_matrix_json(mm.basis)},
          {"transpose_closed", mm.transpose_closed},
          {"three_term_check", mm.off_tridiagonal},
          {"modes", std::move(modes)}};
}

inline Json grassmann_report_to_json(const GrassmannReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"quantity", row.quantity},
                    {"formula", row.formula},
                    {"n", row.n},
                    {"paper_formula", row.paper_formula},
                    {"computed", row.computed},
                    {"match", row.match}});
  Json modes = Json::array();
  for (const auto& m : r.modes)
    modes.push_back({{"mode", m.mode},
                     {"creation", m.creation},
                     {"preservation", m.preservation},
                     {"annihilation", m.annihilation}});
  return {{"type", "grassmann-report"},
          {"q", r.q},
          {"v", r.v},
          {"d", r.d},
          {"class_labelling", "class k = d - dim(intersection)"},
          {"p_k_1_n", r.p_k_1_n},
          {"p_k_0_n", r.p_k_0_n},
          {"modes", std::move(modes)},
          {"comparisons", std::move(rows)},
          {"match", r.all_match}};
}

}  // namespace schemeq::io
