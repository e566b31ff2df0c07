#pragma once
// Command-line front end. Exit codes: 0 success, 2 validation error (one JSON
// line on stderr), 3 resource cap exceeded, 64 usage error.

#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schemeq/io.hpp"

namespace schemeq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitUsage = 64;

struct RunConfig {
  std::string format;  // json | csv; empty picks the command default
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  Tolerances tol;
};

struct Output {
  std::string text;
  int code = kExitOk;
  std::string diagnostic;  // set together with a nonzero code
};

namespace detail {

inline std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("parameter", std::string(what) + ": not a number: " + item);
    }
  }
  return out;
}

/// "0|1,2|3" -> {{0},{1,2},{3}}.
inline std::vector<std::vector<Index>> parse_parts(const std::string& s) {
  std::vector<std::vector<Index>> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '|')) {
    std::vector<Index> p;
    for (double v : parse_list(part, "parts")) p.push_back(static_cast<Index>(v));
    parts.push_back(std::move(p));
  }
  return parts;
}

inline std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

inline std::string format_of(const RunConfig& cfg, const char* fallback, bool csv_ok, const std::string& cmd) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  if (f != "json" && f != "csv") throw Error("parameter", "unknown format " + f);
  if (f == "csv" && !csv_ok) throw Error("parameter", "csv output is not available for " + cmd);
  return f;
}

inline GroupTable group_arg(const std::string& name, const std::string& file) {
  if (!file.empty()) return io::group_from_json(io::read_json_file(file));
  if (name.empty()) throw Error("parameter", "a group is required (--group or --group-file)");
  return io::group_from_json(io::Json{{"builtin", name}});
}

inline std::vector<double> weights_arg(const SpectralData& sd, const std::string& weights, Index index) {
  if (!weights.empty()) return parse_list(weights, "weights");
  if (index < 0 || index >= sd.rank())
    throw Error("parameter", "--index must lie in 0.." + std::to_string(sd.rank() - 1), {double(index)});
  std::vector<double> w(sd.rank(), 0.0);
  w[index] = 1.0;
  return w;
}

inline io::Json axiom_report_json(const AxiomReport& rep) {
  io::Json axioms = io::Json::array();
  for (int a = 0; a < 5; ++a)
    axioms.push_back({{"axiom", a + 1},
                      {"passed", rep.axioms[a].passed},
                      {"detail", rep.axioms[a].detail},
                      {"witness", rep.axioms[a].witness}});
  return {{"type", "axiom-report"}, {"scheme", rep.scheme()}, {"commutative", rep.commutative()},
          {"axioms", std::move(axioms)}};
}

}  // namespace detail

/// Parses argv and runs one subcommand. Text output goes to `out` (or the
/// --out file), diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Association schemes, hypergroup walks, entangled Markov chains and interacting Fock spaces",
               "schemeq"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("-o,--out", cfg.out, "write output to a file");
  app.add_option("--seed", cfg.seed, "seed for the separating combinations");
  app.add_option("--tolerance-eig", cfg.tol.eig, "eigenvalue clustering tolerance (times n)");
  app.add_option("--tolerance-zero", cfg.tol.zero, "positivity and zero tolerance");

  // shared argument slots
  std::string in, family, group, group_file, characters, weights, p0, chain, obs, graph, omega, alpha, parts, modes;
  int v = 0, k = 0, d = 0, root = 0;
  std::int64_t q = 2;
  Index index = -1, steps = 10, level = 0, m = 8;

  auto scheme_cmd = app.add_subcommand("scheme", "build and check association schemes");
  scheme_cmd->require_subcommand(1);
  auto s_build = scheme_cmd->add_subcommand("build", "construct a scheme");
  s_build->add_option("--family", family, "group | conjugacy | subscheme | johnson | grassmann | fused")->required();
  s_build->add_option("--group", group, "builtin group: C<n>, S<n> or Q8");
  s_build->add_option("--group-file", group_file, "group table JSON");
  s_build->add_option("--v", v);
  s_build->add_option("--k", k);
  s_build->add_option("--q", q);
  s_build->add_option("--d", d);
  s_build->add_option("--in", in, "scheme JSON (fused family)");
  s_build->add_option("--parts", parts, "class partition for fused, e.g. 0|1,2|3");
  auto s_verify = scheme_cmd->add_subcommand("verify", "check the scheme axioms");
  s_verify->add_option("--in", in)->required();
  auto s_params = scheme_cmd->add_subcommand("params", "intersection numbers");
  s_params->add_option("--in", in)->required();

  auto spec_cmd = app.add_subcommand("spectral", "idempotents and dual structure constants");
  spec_cmd->require_subcommand(1);
  auto sp_idem = spec_cmd->add_subcommand("idempotents", "primitive idempotents");
  sp_idem->add_option("--in", in)->required();
  sp_idem->add_option("--group", group, "with --characters: use the character route");
  sp_idem->add_option("--group-file", group_file);
  sp_idem->add_option("--characters", characters, "character table JSON");
  auto sp_krein = spec_cmd->add_subcommand("krein", "Krein parameters");
  sp_krein->add_option("--in", in)->required();
  auto sp_hyper = spec_cmd->add_subcommand("hypergroup", "hypergroup convolution weights");
  sp_hyper->add_option("--in", in)->required();

  auto qmc_cmd = app.add_subcommand("qmc", "Schur-multiplier Markov chains");
  qmc_cmd->require_subcommand(1);
  std::vector<CLI::App*> qmc_subs;
  auto q_op = qmc_cmd->add_subcommand("op", "transition operator and complete-positivity check");
  auto q_restrict = qmc_cmd->add_subcommand("restrict", "classical chain on the idempotents");
  auto q_walk = qmc_cmd->add_subcommand("walk", "distribution trajectory");
  for (auto* c : {q_op, q_restrict, q_walk}) {
    c->add_option("--in", in, "scheme JSON");
    c->add_option("--weights", weights, "comma-separated convex weights");
    c->add_option("--index", index, "single idempotent index");
  }
  for (auto* c : {q_restrict, q_walk}) c->add_option("--p0", p0, "initial distribution");
  q_walk->add_option("--chain", chain, "chain JSON instead of a scheme");
  q_walk->add_option("--steps", steps);

  auto emc_cmd = app.add_subcommand("emc", "entangled Markov chains");
  emc_cmd->require_subcommand(1);
  auto e_build = emc_cmd->add_subcommand("build", "truncated state amplitudes");
  auto e_expect = emc_cmd->add_subcommand("expect", "local expectation");
  auto e_ent = emc_cmd->add_subcommand("entangled", "entanglement criterion");
  for (auto* c : {e_build, e_expect, e_ent}) c->add_option("--chain", chain)->required();
  for (auto* c : {e_build, e_expect}) c->add_option("--n", level, "level")->required();
  e_expect->add_option("--obs", obs)->required();

  auto ifs_cmd = app.add_subcommand("ifs", "interacting Fock spaces");
  ifs_cmd->require_subcommand(1);
  auto i_jacobi = ifs_cmd->add_subcommand("jacobi", "tridiagonal data from a graph or a Jacobi sequence");
  auto i_moments = ifs_cmd->add_subcommand("moments", "vacuum moments");
  auto i_strat = ifs_cmd->add_subcommand("stratify", "distance partition and quantum decomposition");
  auto i_multi = ifs_cmd->add_subcommand("multimode", "multi-mode ladder operators of a scheme");
  auto i_grass = ifs_cmd->add_subcommand("grassmann-report", "closed forms against computed values");
  for (auto* c : {i_jacobi, i_moments, i_strat}) {
    c->add_option("--graph", graph, "graph JSON");
    c->add_option("--root", root);
  }
  for (auto* c : {i_jacobi, i_moments}) {
    c->add_option("--omega", omega, "comma-separated omega_1..omega_L");
    c->add_option("--alpha", alpha, "comma-separated alpha_1..alpha_{L+1}");
  }
  i_moments->add_option("--m", m, "largest moment");
  i_multi->add_option("--scheme,--in", in)->required();
  i_multi->add_option("--modes", modes, "comma-separated class indices");
  i_grass->add_option("--q", q);
  i_grass->add_option("--v", v)->required();
  i_grass->add_option("--d", d)->required();

  for (auto* sub : app.get_subcommands({}))
    for (auto* leaf : sub->get_subcommands({})) leaf->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  auto diagnostic = [&](const Error& e) {
    io::Json w = io::Json::array();
    for (double x : e.witness()) {
      if (x == std::floor(x) && std::abs(x) < 9e15) w.push_back(static_cast<std::int64_t>(x));
      else w.push_back(x);
    }
    return io::Json{{"error", e.code()}, {"witness", std::move(w)}, {"message", e.what()}}.dump();
  };

  Output res;
  try {
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(cfg.tol.eig >= eps) || !(cfg.tol.zero >= eps))
      throw Error("parameter", "tolerance overrides must be at least machine epsilon", {cfg.tol.eig, cfg.tol.zero});
    auto load_scheme = [&]() { return io::scheme_from_json(io::read_json_file(in)); };
    auto spectral = [&](const AssociationScheme& s) { return primitive_idempotents(s, cfg.tol, cfg.seed); };
    auto load_spec = [&]() {
      auto [t, p] = io::chain_from_json(io::read_json_file(chain));
      return make_chain_spec(p, t, cfg.tol);
    };

    if (s_build->parsed()) {
      detail::format_of(cfg, "json", false, "scheme build");
      AssociationScheme s;
      if (family == "group") s = build_group_scheme(detail::group_arg(group, group_file));
      else if (family == "conjugacy") s = build_conjugacy_scheme(detail::group_arg(group, group_file));
      else if (family == "subscheme") {
        const GroupTable g = detail::group_arg(group, group_file);
        s = build_subscheme(g, inner_automorphisms(g));
      } else if (family == "johnson") s = build_johnson(v, k);
      else if (family == "grassmann") s = build_grassmann(q, v, d);
      else if (family == "fused") s = commutative_reduction(load_scheme(), detail::parse_parts(parts));
      else throw Error("parameter", "unknown family " + family);
      res.text = detail::dump(io::scheme_to_json(s));
    } else if (s_verify->parsed()) {
      detail::format_of(cfg, "json", false, "scheme verify");
      const AxiomReport rep = verify_axioms(load_scheme());
      res.text = detail::dump(detail::axiom_report_json(rep));
      if (!rep.scheme()) {
        const auto& a = rep.axioms[rep.first_failure() - 1];
        res.code = kExitValidation;
        res.diagnostic = io::Json{{"error", "axiom-" + std::to_string(rep.first_failure())},
                                  {"witness", a.witness},
                                  {"message", a.detail}}
                             .dump();
      }
    } else if (s_params->parsed()) {
      const auto p = intersection_numbers(load_scheme());
      res.text = detail::format_of(cfg, "json", true, "scheme params") == "csv"
                     ? io::tensor_csv("p", p.rank, [&](Index i, Index j, Index k) { return p(k, i, j); })
                     : detail::dump(io::intersection_to_json(p));
    } else if (sp_idem->parsed()) {
      detail::format_of(cfg, "json", false, "spectral idempotents");
      const AssociationScheme s = load_scheme();
      SpectralData sd;
      if (!characters.empty()) {
        const GroupTable g = detail::group_arg(group, group_file);
        sd = idempotents_from_characters(g, io::character_table_from_json(io::read_json_file(characters)), cfg.tol);
        if (sd.n != s.n) throw Error("parameter", "character table and scheme disagree in size");
      } else {
        sd = spectral(s);
      }
      res.text = detail::dump(io::spectral_to_json(sd, cfg.tol));
    } else if (sp_krein->parsed()) {
      const AssociationScheme s = load_scheme();
      const auto kt = krein_parameters(s, spectral(s), cfg.tol);
      res.text = detail::format_of(cfg, "json", true, "spectral krein") == "csv"
                     ? io::tensor_csv("q", kt.rank, [&](Index i, Index j, Index k) { return kt(k, i, j); })
                     : detail::dump(io::krein_to_json(kt, cfg.tol));
    } else if (sp_hyper->parsed()) {
      const AssociationScheme s = load_scheme();
      const auto h = hypergroup(s, spectral(s), cfg.tol);
      res.text = detail::format_of(cfg, "csv", true, "spectral hypergroup") == "csv"
                     ? io::tensor_csv("h", h.rank, h)
                     : detail::dump(io::hypergroup_to_json(h, cfg.tol));
    } else if (q_op->parsed() || q_restrict->parsed() || (q_walk->parsed() && chain.empty())) {
      if (in.empty()) throw Error("parameter", "--in scheme is required");
      const AssociationScheme s = load_scheme();
      const SpectralData sd = spectral(s);
      const auto T = make_transition_operator(sd, detail::weights_arg(sd, weights, index), cfg.tol);
      if (q_op->parsed()) {
        detail::format_of(cfg, "json", false, "qmc op");
        res.text = detail::dump(io::transition_operator_to_json(T, choi_psd_check(T, cfg.tol)));
      } else {
        ClassicalChain c = restrict_to_subalgebra(T, sd, cfg.tol);
        if (!p0.empty()) {
          const auto p = detail::parse_list(p0, "p0");
          c = make_chain(c.t, Eigen::Map<const RealVector>(p.data(), static_cast<Index>(p.size())), cfg.tol);
        }
        if (q_restrict->parsed()) {
          detail::format_of(cfg, "json", false, "qmc restrict");
          io::Json j = io::chain_to_json(c.t, c.p0);
          j["stationary"] = io::vector_json(stationary_distribution(c));
          res.text = detail::dump(j);
        } else {
          const auto traj = walk(c, steps);
          res.text = detail::format_of(cfg, "csv", true, "qmc walk") == "csv" ? io::trajectory_csv(traj) : [&] {
            io::Json j = io::Json::array();
            for (const auto& p : traj) j.push_back(io::vector_json(p));
            return detail::dump(j);
          }();
        }
      }
    } else if (q_walk->parsed()) {
      auto [t, p] = io::chain_from_json(io::read_json_file(chain));
      const auto traj = walk(make_chain(t, p, cfg.tol), steps);
      res.text = detail::format_of(cfg, "csv", true, "qmc walk") == "csv" ? io::trajectory_csv(traj) : [&] {
        io::Json j = io::Json::array();
        for (const auto& x : traj) j.push_back(io::vector_json(x));
        return detail::dump(j);
      }();
    } else if (e_build->parsed()) {
      detail::format_of(cfg, "json", false, "emc build");
      const auto spec = load_spec();
      const auto st = build_state(spec, level);
      io::Json amps = io::Json::array();
      for (Index i = 0; i < st.amplitudes.size(); ++i) amps.push_back(st.amplitudes(i).real());
      res.text = detail::dump({{"type", "truncated-state"},
                               {"level", st.level},
                               {"states", spec.S},
                               {"max_level", spec.max_level},
                               {"norm_squared", st.amplitudes.squaredNorm()},
                               {"amplitudes", std::move(amps)}});
    } else if (e_expect->parsed()) {
      detail::format_of(cfg, "json", false, "emc expect");
      const auto spec = load_spec();
      const auto o = io::observable_from_json(io::read_json_file(obs));
      const auto lo = make_local_observable(spec, o.sites, o.matrix, cfg.tol);
      io::Json j{{"type", "local-expectation"},
                 {"level", level},
                 {"sites", lo.sites},
                 {"expectation", local_expectation(spec, lo, level)}};
      if (!o.factors.empty()) j["nested_evaluation"] = qmc_evaluate(spec, o.factors);
      res.text = detail::dump(j);
    } else if (e_ent->parsed()) {
      detail::format_of(cfg, "json", false, "emc entangled");
      const auto spec = load_spec();
      const auto rep = is_entangled(spec.t, cfg.tol);
      io::Json j{{"type", "entanglement"}, {"entangled", rep.entangled}};
      j["witness"] = rep.entangled ? io::Json::array({rep.i, rep.j}) : io::Json(nullptr);
      j["value"] = rep.entangled ? io::Json(rep.value) : io::Json(nullptr);
      j["p_of_identity"] = io::real_matrix_json(rep.p_of_identity);
      res.text = detail::dump(j);
    } else if (i_jacobi->parsed() || i_moments->parsed()) {
      const bool from_graph = !graph.empty();
      if (from_graph == !omega.empty()) throw Error("parameter", "give exactly one of --graph and --omega");
      io::Json j{{"type", i_jacobi->parsed() ? "jacobi" : "moments"}};
      OneModeIFS ifs;
      std::vector<std::int64_t> walks;
      if (from_graph) {
        const Graph g = io::graph_from_json(io::read_json_file(graph));
        const auto sg = stratify(g, root);
        const auto rj = radial_jacobi(sg, cfg.tol);
        ifs = ifs_from_jacobi(rj.jacobi);
        j["root"] = root;
        j["jacobi"] = io::jacobi_to_json(rj.jacobi);
        j["drg_consistent"] = rj.drg_consistent;
        if (i_moments->parsed()) walks = graph_moments(g, root, m);
      } else {
        ifs = ifs_from_jacobi(make_jacobi_data(detail::parse_list(omega, "omega"), detail::parse_list(alpha, "alpha")));
        j["jacobi"] = io::jacobi_to_json(ifs.jacobi);
      }
      if (i_jacobi->parsed()) {
        detail::format_of(cfg, "json", false, "ifs jacobi");
        j["tridiagonal"] = io::real_matrix_json(ifs.T);
        res.text = detail::dump(j);
      } else {
        const auto vm = vacuum_moments(ifs, m);
        if (detail::format_of(cfg, "json", true, "ifs moments") == "csv") {
          res.text = from_graph ? "m,moment,closed_walks\n" : "m,moment\n";
          for (Index t = 0; t <= m; ++t)
            res.text += std::to_string(t) + "," + io::fmt17(vm[t]) +
                        (from_graph ? "," + std::to_string(walks[t]) : std::string()) + "\n";
        } else {
          j["moments"] = vm;
          if (from_graph) j["closed_walks"] = walks;
          res.text = detail::dump(j);
        }
      }
    } else if (i_strat->parsed()) {
      detail::format_of(cfg, "json", false, "ifs stratify");
      if (graph.empty()) throw Error("parameter", "--graph is required");
      const auto sg = stratify(io::graph_from_json(io::read_json_file(graph)), root);
      const auto qd = quantum_decomposition(sg);
      res.text = detail::dump({{"type", "stratification"},
                               {"root", root},
                               {"strata", sg.strata},
                               {"unreachable", sg.unreachable},
                               {"a_plus", io::int_matrix_json(qd.Aplus)},
                               {"a_minus", io::int_matrix_json(qd.Aminus)},
                               {"a_zero", io::int_matrix_json(qd.Azero)}});
    } else if (i_multi->parsed()) {
      detail::format_of(cfg, "json", false, "ifs multimode");
      std::vector<Index> mode_list;
      for (double x : detail::parse_list(modes, "modes")) mode_list.push_back(static_cast<Index>(x));
      res.text = detail::dump(io::multimode_to_json(multimode_ifs(load_scheme(), mode_list, cfg.tol)));
    } else if (i_grass->parsed()) {
      detail::format_of(cfg, "json", false, "ifs grassmann-report");
      res.text = detail::dump(io::grassmann_report_to_json(grassmann_mode_parameters(q, v, d, cfg.tol)));
    }
  } catch (const ResourceError& e) {
    err << diagnostic(e) << "\n";
    return kExitResource;
  } catch (const Error& e) {
    err << diagnostic(e) << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << diagnostic(Error("input", e.what())) << "\n";
    return kExitValidation;
  }

  if (cfg.out.empty()) {
    out << res.text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << diagnostic(Error("output", "cannot write " + cfg.out)) << "\n";
      return kExitValidation;
    }
    f << res.text;
  }
  if (res.code != kExitOk) err << res.diagnostic << "\n";
  return res.code;
}

}  // namespace schemeq::cli
