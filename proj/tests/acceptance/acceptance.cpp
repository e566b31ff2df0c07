// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the failing criteria are exactly kKnownFailures, so an
// unexpected failure or an unexpected pass both turn the ctest entry red.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "schemeq/io.hpp"

using namespace schemeq;
namespace fs = std::filesystem;

namespace {

const std::set<int> kKnownFailures{7};

struct Criterion {
  int number;
  std::string name;
  std::vector<std::string> failures;
  int checks = 0;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  bool passed() const { return failures.empty(); }
};

std::string num(double x) {
  std::ostringstream ss;
  ss.precision(12);
  ss << x;
  return ss.str();
}

std::vector<std::pair<std::string, AssociationScheme>> commutative_schemes() {
  return {{"C5", build_group_scheme(cyclic_group(5))},
          {"S3conj", build_conjugacy_scheme(symmetric_group(3))},
          {"Q8conj", build_conjugacy_scheme(quaternion_group())},
          {"J(4,2)", build_johnson(4, 2)},
          {"J(5,2)", build_johnson(5, 2)},
          {"J2(4,2)", build_grassmann(2, 4, 2)}};
}

std::function<int(long, long)> relation_of(const AssociationScheme& s) {
  return [&s](long x, long y) {
    for (Index k = 0; k < s.rank(); ++k)
      if (s.classes[k](x, y)) return static_cast<int>(k);
    return -1;
  };
}

RealMatrix random_stochastic(Index S, std::mt19937_64& rng) {
  RealMatrix t(S, S);
  for (Index i = 0; i < S; ++i) {
    for (Index j = 0; j < S; ++j) t(i, j) = uniform01(rng) < 0.25 ? 0.0 : 0.05 + uniform01(rng);
    if (t.row(i).sum() == 0) t(i, i) = 1;
    t.row(i) /= t.row(i).sum();
  }
  return t;
}

RealVector random_distribution(Index S, std::mt19937_64& rng) {
  RealVector p(S);
  for (Index j = 0; j < S; ++j) p(j) = 0.05 + uniform01(rng);
  return p / p.sum();
}

ComplexMatrix random_hermitian(Index d, std::mt19937_64& rng) {
  ComplexMatrix A(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = cplx(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
  return (A + A.adjoint()) / 2.0;
}

Criterion axioms() {
  Criterion c{1, "axioms"};
  struct Case {
    std::string name;
    AssociationScheme s;
    bool commutative;
  };
  const std::vector<Case> cases{{"C5", build_group_scheme(cyclic_group(5)), true},
                                {"S3", build_group_scheme(symmetric_group(3)), false},
                                {"S3conj", build_conjugacy_scheme(symmetric_group(3)), true},
                                {"Q8conj", build_conjugacy_scheme(quaternion_group()), true},
                                {"J(4,2)", build_johnson(4, 2), true},
                                {"J(5,2)", build_johnson(5, 2), true},
                                {"J2(4,2)", build_grassmann(2, 4, 2), true}};
  for (const auto& k : cases) {
    const auto rep = verify_axioms(k.s);
    c.check(rep.scheme(), k.name + " fails axiom " + std::to_string(rep.first_failure()));
    c.check(rep.axioms[4].passed == k.commutative, k.name + " commutativity differs from the claim");
  }
  return c;
}

Criterion intersection() {
  Criterion c{2, "intersection-numbers"};
  const auto s3 = build_conjugacy_scheme(symmetric_group(3));
  const auto j42 = build_johnson(4, 2);
  const auto p3 = intersection_numbers(s3);
  const auto pj = intersection_numbers(j42);
  c.check(p3(0, 1, 1) == 3 && p3(1, 1, 1) == 0 && p3(2, 1, 1) == 3, "S3conj p[.][1][1] != (3,0,3)");
  c.check(pj(1, 1, 1) == 2 && pj(2, 1, 1) == 4, "J(4,2) p[1][1][1], p[2][1][1] != (2,4)");
  for (const auto& [name, s] : std::vector<std::pair<std::string, AssociationScheme>>{{"S3conj", s3}, {"J(4,2)", j42}}) {
    const auto p = intersection_numbers(s);
    const auto rel = relation_of(s);
    bool ok = true;
    for (long x = 0; x < s.n; ++x)
      for (long y = 0; y < s.n; ++y)
        for (Index i = 0; i < s.rank(); ++i)
          for (Index j = 0; j < s.rank(); ++j)
            ok &= oracle::two_leg_paths(s.n, rel, x, y, int(i), int(j)) == p(rel(x, y), i, j);
    c.check(ok, name + " disagrees with path counting");
  }
  return c;
}

Criterion spectral() {
  Criterion c{3, "spectral"};
  for (const auto& [name, s] : commutative_schemes()) {
    const auto sd = primitive_idempotents(s);
    double proj = 0;
    ComplexMatrix sum = ComplexMatrix::Zero(s.n, s.n);
    Index msum = 0;
    for (Index j = 0; j < sd.rank(); ++j) {
      for (Index k = 0; k < sd.rank(); ++k)
        proj = std::max(proj, max_abs(sd.E[j] * sd.E[k] - (j == k ? sd.E[j] : ComplexMatrix::Zero(s.n, s.n))));
      sum += sd.E[j];
      msum += sd.m[j];
    }
    c.check(proj < 1e-9, name + " E_jE_k defect " + num(proj));
    const double id = max_abs(sum - ComplexMatrix::Identity(s.n, s.n));
    c.check(id < 1e-9, name + " sum E_j - I defect " + num(id));
    c.check(msum == s.n, name + " multiplicities sum to " + std::to_string(msum));
  }
  auto m = primitive_idempotents(build_conjugacy_scheme(symmetric_group(3))).m;
  std::sort(m.begin(), m.end());
  c.check(m == std::vector<Index>{1, 1, 4}, "S3conj multiplicities are not {1,1,4}");
  for (const auto& [name, g, ct] : std::vector<std::tuple<std::string, GroupTable, CharacterTable>>{
           {"S3", symmetric_group(3), s3_character_table()}, {"Q8", quaternion_group(), q8_character_table()}}) {
    double diff = 1;
    match_idempotents(idempotents_from_characters(g, ct), primitive_idempotents(build_conjugacy_scheme(g)), &diff);
    c.check(diff < 1e-8, name + " character path differs by " + num(diff));
  }
  return c;
}

Criterion hypergroups() {
  Criterion c{4, "hypergroup"};
  for (const auto& [name, s] : commutative_schemes()) {
    const auto h = hypergroup(s, primitive_idempotents(s));
    double worst_sum = 0, min_entry = 0;
    for (Index i = 0; i < h.rank; ++i)
      for (Index j = 0; j < h.rank; ++j) {
        double sum = 0;
        for (Index k = 0; k < h.rank; ++k) {
          sum += h(i, j, k);
          min_entry = std::min(min_entry, h(i, j, k));
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1));
      }
    c.check(worst_sum <= 1e-8, name + " row sum off by " + num(worst_sum));
    c.check(min_entry >= -1e-9, name + " negative weight " + num(min_entry));
  }
  {
    const auto s = build_group_scheme(cyclic_group(5));
    const auto sd = primitive_idempotents(s);
    const auto h = hypergroup(s, sd);
    std::vector<long> lab(5, -1);
    for (Index j = 0; j < 5; ++j)
      for (long ch = 0; ch < 5; ++ch) {
        double d = 0;
        for (long y = 0; y < 5; ++y)
          for (long z = 0; z < 5; ++z) d = std::max(d, std::abs(sd.E[j](y, z) - oracle::dft_idempotent(5, ch, y, z)));
        if (d < 1e-9) lab[j] = ch;
      }
    double dev = 0;
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j)
        for (Index k = 0; k < 5; ++k)
          dev = std::max(dev, std::abs(h(i, j, k) - (lab[k] == (lab[i] + lab[j]) % 5 ? 1.0 : 0.0)));
    c.check(std::count(lab.begin(), lab.end(), -1) == 0 && dev < 1e-9, "C5 is not the permutation tensor, dev " + num(dev));
  }
  {
    const auto s = build_conjugacy_scheme(symmetric_group(3));
    const auto h = hypergroup(s, primitive_idempotents(s));
    const double dev =
        std::max({std::abs(h(2, 2, 0) - 0.25), std::abs(h(2, 2, 1) - 0.25), std::abs(h(2, 2, 2) - 0.5)});
    c.check(dev <= 1e-9, "S3 h[2][2] = (" + num(h(2, 2, 0)) + "," + num(h(2, 2, 1)) + "," + num(h(2, 2, 2)) + ")");
  }
  return c;
}

Criterion complete_positivity() {
  Criterion c{5, "complete-positivity"};
  for (const auto& [name, s] :
       std::vector<std::pair<std::string, AssociationScheme>>{{"J(4,2)", build_johnson(4, 2)},
                                                              {"S3conj", build_conjugacy_scheme(symmetric_group(3))}}) {
    const auto sd = primitive_idempotents(s);
    for (Index i = 0; i < sd.rank(); ++i) {
      const auto rep = choi_psd_check(make_transition_operator(sd, i));
      c.check(rep.min_eigenvalue >= -1e-9, name + " weight " + std::to_string(i) + " min eigenvalue " +
                                               num(rep.min_eigenvalue));
    }
  }
  return c;
}

Criterion entangled_chains() {
  Criterion c{6, "entangled-chains"};
  std::mt19937_64 rng(kDefaultSeed);
  double worst_norm = 0, worst_stab = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index S = 2 + trial % 2;
    const Index n = 1 + trial % 8;
    const auto spec = make_chain_spec(random_distribution(S, rng), random_stochastic(S, rng));
    worst_norm = std::max(worst_norm, std::abs(build_state(spec, n).amplitudes.norm() - 1));
    if (trial % 10 == 0) {
      const Index sites = 1 + trial % 3;
      ComplexMatrix A = random_hermitian(detail::ipow(S, sites), rng);
      const auto obs = make_local_observable(spec, sites, A);
      const double base = local_expectation(spec, obs, sites);
      for (Index level = sites; level <= spec.max_level; ++level)
        worst_stab = std::max(worst_stab, std::abs(local_expectation(spec, obs, level) - base));
    }
  }
  c.check(worst_norm <= 1e-10, "norm defect " + num(worst_norm));
  c.check(worst_stab < 1e-10, "level instability " + num(worst_stab));
  for (Index S = 2; S <= 3; ++S) {
    const auto rep = is_entangled(RealMatrix::Constant(S, S, 1.0 / double(S)));
    c.check(rep.entangled && std::abs(rep.value - 1.0) <= 1e-12,
            "uniform t on " + std::to_string(S) + " states: witness value " + num(rep.value));
  }
  std::vector<int> perm{0, 1, 2};
  do {
    RealMatrix t = RealMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) t(i, perm[i]) = 1;
    c.check(!is_entangled(t).entangled, "permutation t reported entangled");
  } while (std::next_permutation(perm.begin(), perm.end()));
  double worst_eval = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index S = 2 + trial % 2;
    const auto spec = make_chain_spec(random_distribution(S, rng), random_stochastic(S, rng));
    const Index k = trial % 3;
    std::vector<ComplexMatrix> As;
    ComplexMatrix prod = ComplexMatrix::Identity(1, 1);
    for (Index s = 0; s <= k; ++s) {
      As.push_back(random_hermitian(S, rng));
      prod = kron(prod, As.back());
    }
    std::vector<std::vector<double>> rows(S, std::vector<double>(S));
    for (Index i = 0; i < S; ++i)
      for (Index j = 0; j < S; ++j) rows[i][j] = spec.t(i, j);
    const double direct =
        oracle::psi_expectation(std::vector<double>(spec.p0.data(), spec.p0.data() + S), rows, int(k + 1), int(k + 1),
                                [&](long a, long b) { return prod(a, b); });
    worst_eval = std::max(worst_eval, std::abs(qmc_evaluate(spec, As) - direct));
  }
  c.check(worst_eval <= 1e-9, "nested evaluation differs by " + num(worst_eval));
  return c;
}

Criterion ifs_moments() {
  Criterion c{7, "ifs-moments"};
  {
    const auto rj = radial_jacobi(stratify(path_graph(2), 0));
    const auto vm = vacuum_moments(ifs_from_jacobi(rj.jacobi), 8);
    bool ok = true;
    for (int m = 0; m <= 8; ++m) ok &= vm[m] == (m % 2 == 0 ? 1.0 : 0.0);
    c.check(ok, "two-vertex moments are not (1,0,1,0,1,0,1,0,1)");
  }
  for (const auto& [name, g] : std::vector<std::pair<std::string, Graph>>{
           {"octahedron", octahedron_graph()}, {"spidernet S(4,5,2)", spidernet_graph(4, 5, 2, 3)}}) {
    std::vector<std::vector<int>> adj(g.n, std::vector<int>(g.n));
    for (Index x = 0; x < g.n; ++x)
      for (Index y = 0; y < g.n; ++y) adj[x][y] = g.adj(x, y);
    const auto walks = graph_moments(g, 0, 8);
    const auto rj = radial_jacobi(stratify(g, 0));
    const auto vm = vacuum_moments(ifs_from_jacobi(rj.jacobi), 8);
    for (int m = 0; m <= 8; ++m) {
      const long ref = oracle::closed_walks(adj, 0, m);
      c.check(walks[m] == ref, name + " closed walks m=" + std::to_string(m));
      c.check(std::llround(vm[m]) == ref, name + " vacuum moment m=" + std::to_string(m) + " = " + num(vm[m]) +
                                              ", walks " + std::to_string(ref));
    }
  }
  const auto rj = radial_jacobi(stratify(octahedron_graph(), 0));
  const std::vector<double> omega{4, 8}, alpha{0, 2, 0};
  bool om = rj.jacobi.omega.size() == omega.size(), al = rj.jacobi.alpha.size() == alpha.size();
  for (size_t k = 0; om && k < omega.size(); ++k) om = std::abs(rj.jacobi.omega[k] - omega[k]) <= 1e-9;
  for (size_t k = 0; al && k < alpha.size(); ++k) al = std::abs(rj.jacobi.alpha[k] - alpha[k]) <= 1e-9;
  std::string got;
  for (double w : rj.jacobi.omega) got += (got.empty() ? "" : ",") + num(w);
  c.check(om, "octahedron omega = (" + got + "), expected (4,8)");
  c.check(al, "octahedron alpha differs from (0,2,0)");
  c.check(rj.drg_consistent, "octahedron radial data not consistent");
  return c;
}

Criterion multimode() {
  Criterion c{8, "multimode-ifs"};
  const std::vector<std::pair<std::string, AssociationScheme>> cases{
      {"C5", build_group_scheme(cyclic_group(5))},
      {"S3conj", build_conjugacy_scheme(symmetric_group(3))},
      {"J(4,2)", build_johnson(4, 2)},
      {"J2(4,2)", build_grassmann(2, 4, 2)}};
  for (const auto& [name, s] : cases) {
    const auto mm = multimode_ifs(s);
    const double ttc = three_term_check(mm);
    c.check(ttc < 1e-9, name + " three-term check " + num(ttc));
    IntMatrix sum = IntMatrix::Zero(s.n, s.n);
    for (Index j = 1; j < s.rank(); ++j) sum += s.classes[j];
    c.check(sum == IntMatrix::Ones(s.n, s.n) - IntMatrix::Identity(s.n, s.n), name + " classes do not sum to J - I");
    const Index r = s.rank();
    const RealMatrix JI = RealMatrix::Ones(s.n, s.n) - RealMatrix::Identity(s.n, s.n);
    RealMatrix direct(r, r), ladders = RealMatrix::Zero(r, r);
    for (Index k = 0; k < r; ++k)
      for (Index i = 0; i < r; ++i) {
        const RealMatrix uk = s.classes[k].cast<double>() / std::sqrt(double(s.n * mm.valency[k]));
        const RealMatrix ui = s.classes[i].cast<double>() / std::sqrt(double(s.n * mm.valency[i]));
        direct(k, i) = (uk.transpose() * JI * ui).trace();
      }
    for (size_t j = 0; j < mm.X.size(); ++j) ladders += mm.aplus[j] + mm.azero[j] + mm.aminus[j];
    c.check(max_abs(ladders - direct) < 1e-9, name + " ladder sum differs from J - I");
  }
  const auto rep = grassmann_mode_parameters(2, 4, 2);
  c.check(!rep.rows.empty(), "Grassmann report has no comparison rows");
  const auto j = io::grassmann_report_to_json(rep);
  bool populated = true;
  for (const auto& row : j.at("comparisons"))
    populated &= row.contains("paper_formula") && row.contains("computed") && row.contains("match");
  c.check(populated, "Grassmann report rows lack computed/closed-form columns");
  return c;
}

std::string run_cli(const std::string& args, int& code) {
  const fs::path out = fs::temp_directory_path() / ("schemeq_acceptance_" + std::to_string(::getpid()));
  const char* env_bin = std::getenv("SCHEMEQ_CLI");
  const std::string cmd = std::string("'") + (env_bin ? env_bin : SCHEMEQ_CLI_PATH) + "' " + args + " >'" +
                          out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  fs::remove(out);
  return ss.str();
}

Criterion determinism() {
  Criterion c{9, "determinism"};
  const std::string samples = SCHEMEQ_SAMPLES_DIR;
  for (const std::string args : {std::string("scheme build --family grassmann --q 2 --v 4 --d 2"),
                                 "spectral idempotents --in '" + samples + "/j42.json'",
                                 "spectral hypergroup --in '" + samples + "/s3conj.json'",
                                 "qmc walk --in '" + samples + "/s3conj.json' --index 2 --steps 25",
                                 "emc expect --chain '" + samples + "/chain_uniform.json' --obs '" + samples +
                                     "/obs_zz.json' --n 5",
                                 "ifs multimode --scheme '" + samples + "/j42.json'"}) {
    int a = 0, b = 0;
    const std::string first = run_cli(args, a), second = run_cli(args, b);
    c.check(a == 0 && b == 0 && !first.empty() && first == second, "not byte-stable: " + args);
  }
  for (const auto& [name, s] : commutative_schemes()) {
    const auto j = io::scheme_to_json(s);
    const auto back = io::scheme_from_json(io::Json::parse(j.dump()));
    c.check(back == s && io::scheme_to_json(back).dump() == j.dump(), name + " JSON round trip");
  }
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion (*)()> all{axioms,       intersection, spectral, hypergroups, complete_positivity,
                                   entangled_chains, ifs_moments, multimode, determinism};
  std::set<int> failed;
  for (size_t k = 0; k < all.size(); ++k) {
    Criterion c;
    try {
      c = all[k]();
    } catch (const std::exception& e) {
      c = Criterion{static_cast<int>(k + 1), "exception"};
      c.failures.push_back(e.what());
    }
    std::string line = (c.passed() ? "PASS " : "FAIL ") + std::to_string(c.number) + " " + c.name + " (" +
                       std::to_string(c.checks - int(c.failures.size())) + "/" + std::to_string(c.checks) + " checks)";
    for (const auto& why : c.failures) line += "; " + why;
    std::cout << line << "\n";
    if (!c.passed()) failed.insert(c.number);
  }
  std::cout << "failed criteria:";
  for (int n : failed) std::cout << " " << n << (kKnownFailures.count(n) ? " (known)" : " (unexpected)");
  for (int n : kKnownFailures)
    if (!failed.count(n)) std::cout << " " << n << " (expected to fail but passed)";
  std::cout << "\n";
  return failed == kKnownFailures ? 0 : 1;
}
