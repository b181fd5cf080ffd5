// Command-line front end: parse a graph spec, dispatch spectral computations,
// emit machine-readable JSON/CSV.
//
// Exit codes: 0 ok, 2 input error, 3 mathematical singularity,
//             4 cross-check disagreement.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <iostream>
#include <set>
#include <thread>

#include "qgraph/bs.hpp"
#include "qgraph/json_io.hpp"
#include "qgraph/negspec.hpp"
#include "qgraph/scattering.hpp"

namespace {

using namespace qgraph;

int exit_code_for(const Error& e) {
  static const std::set<std::string> math = {
      "StepSizeUnderflow",   "ToleranceNotMet",      "ZeroSpectralPoint",
      "IntegralNotConverged", "NearSingularN1",      "DirichletEigenvalueHit",
      "NeumannTripletPole",  "ExtrapolationDiverged", "NonnegativityFailed",
      "PoleHit",             "SingularAlphaMinusK",  "SingularFactor",
      "ZeroWeylValue",       "SingularAtZeta"};
  static const std::set<std::string> crosscheck = {"CountUnstable", "SolverFailure"};
  if (math.count(e.code())) return 3;
  if (crosscheck.count(e.code())) return 4;
  return 2;
}

[[noreturn]] void emit_error(const std::string& code, const std::string& message,
                             int exit_code) {
  ordered_json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  std::cout << j.dump(2) << "\n";
  std::exit(exit_code);
}

// "RE+IMi" / "RE-IMi" / "RE" -> complex
cd parse_complex(const std::string& s) {
  if (s.empty()) throw OutOfRange("empty complex literal");
  std::string t = s;
  // unify unicode minus that shells sometimes paste
  size_t split = std::string::npos;
  for (size_t i = 1; i < t.size(); ++i) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E')
      split = i;  // last sign wins: supports exponents in the real part
  }
  if (t.back() == 'i') {
    if (split == std::string::npos) {  // pure imaginary "IMi"
      std::string im = t.substr(0, t.size() - 1);
      if (im.empty() || im == "+" || im == "-") im += "1";
      return cd(0.0, std::stod(im));
    }
    std::string re = t.substr(0, split);
    std::string im = t.substr(split, t.size() - 1 - split);
    if (im == "+" || im == "-") im += "1";
    return cd(std::stod(re), std::stod(im));
  }
  return cd(std::stod(t), 0.0);
}

ordered_json complex_to_json(cd v) { return ordered_json::array({v.real(), v.imag()}); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct EdgeRef {
  bool is_lead = false;
  int index = 0;  // index within leads or finite_edges
};

// map file edge ids to (kind, per-kind index) in parse order
std::map<int, EdgeRef> edge_index_map(const ordered_json& doc) {
  std::map<int, EdgeRef> out;
  int lead_i = 0, fin_i = 0;
  for (const auto& je : doc.at("edges")) {
    int id = je.at("id").get<int>();
    if (je.at("kind").get<std::string>() == "lead")
      out[id] = {true, lead_i++};
    else
      out[id] = {false, fin_i++};
  }
  return out;
}

int n_threads() {
  if (const char* env = std::getenv("QGRAPH_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"spectral computations for Sturm-Liouville operators on star graphs"};
  app.require_subcommand(1);

  std::string graph_path;
  bool echo_spec = false;
  app.add_option("--graph", graph_path, "graph spec JSON file")->required();
  app.add_flag("--echo-spec", echo_spec, "re-emit the canonical spec and exit");

  // weyl
  auto* c_weyl = app.add_subcommand("weyl", "Weyl function block of one edge");
  int weyl_edge = 0;
  std::string weyl_z, weyl_triplet = "dirichlet";
  double weyl_lambda = 0.0;
  bool have_lambda = false;
  c_weyl->add_option("--edge", weyl_edge, "edge id")->required();
  auto* optz = c_weyl->add_option("--z", weyl_z, "spectral point RE+IMi");
  c_weyl->add_option("--lambda", weyl_lambda, "boundary point lambda+i0")
      ->excludes(optz);
  c_weyl->add_option("--triplet", weyl_triplet, "dirichlet|dn (finite edges)")
      ->check(CLI::IsMember({"dirichlet", "dn"}));

  // kappa
  auto* c_kappa = app.add_subcommand("kappa", "negative-eigenvalue count");
  std::string method = "weyl";
  DiscretizationParams disc;
  bool waive = false;
  c_kappa->add_option("--method", method)->check(CLI::IsMember({"weyl", "oracle", "both"}));
  c_kappa->add_option("--mesh-h", disc.h, "oracle mesh width");
  c_kappa->add_option("--trunc-L", disc.L_trunc, "oracle lead truncation");
  c_kappa->add_flag("--waive-nonnegativity", waive);

  // bargmann
  app.add_subcommand("bargmann", "Bargmann-type upper bound");

  // scatter
  auto* c_scat = app.add_subcommand("scatter", "scattering matrix sweep");
  double lmin = 0.0, lmax = 0.0;
  int steps = 1;
  std::string out_fmt = "csv", ksum = "all";
  c_scat->add_option("--lambda-min", lmin)->required();
  c_scat->add_option("--lambda-max", lmax)->required();
  c_scat->add_option("--steps", steps)->required();
  c_scat->add_option("--out", out_fmt)->check(CLI::IsMember({"csv", "json"}));
  c_scat->add_option("--k-sum", ksum)->check(CLI::IsMember({"all", "leads-only"}));

  // pdet
  auto* c_pdet = app.add_subcommand("pdet", "perturbation determinant");
  std::string pdet_zeta, pdet_z;
  c_pdet->add_option("--zeta", pdet_zeta)->required();
  c_pdet->add_option("--z", pdet_z)->required();

  // oracle
  auto* c_oracle = app.add_subcommand("oracle", "finite-element count and checks");
  c_oracle->add_option("--mesh-h", disc.h, "mesh width");
  c_oracle->add_option("--trunc-L", disc.L_trunc, "lead truncation");

  // validate
  app.add_subcommand("validate", "report invariant violations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // normalize usage errors to the input exit code
  }
  have_lambda = c_weyl->count("--lambda") > 0;

  std::ifstream in(graph_path);
  if (!in) emit_error("FileNotFound", "cannot open graph file: " + graph_path, 2);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    emit_error("ParseError", e.what(), 2);
  }
  MetricGraph g = graph_from_json(doc);

  if (echo_spec) {
    std::cout << graph_to_json(g).dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("validate")) {
    auto issues = validate(g);
    ordered_json j;
    j["valid"] = issues.empty();
    j["issues"] = issues;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("weyl")) {
    auto idx = edge_index_map(doc);
    if (!idx.count(weyl_edge)) emit_error("UnknownEdge", "no edge with that id", 2);
    EdgeRef er = idx[weyl_edge];
    SpectralPoint z = have_lambda ? SpectralPoint::lambda_plus_i0(weyl_lambda)
                                  : SpectralPoint::interior(parse_complex(weyl_z));
    ordered_json j;
    j["edge"] = weyl_edge;
    j["z"] = complex_to_json(z.z);
    j["boundary"] = z.boundary;
    j["sqrt_z"] = complex_to_json(sqrt_branch(z));
    if (er.is_lead) {
      auto r = lead_weyl(g.leads[er.index].potential, z);
      j["kind"] = "lead";
      j["value"] = matrix_to_json(r.m);
      j["condition_number"] = r.cond_n1;
    } else {
      const auto& e = g.finite_edges[er.index];
      if (weyl_triplet == "dirichlet") {
        auto b = finite_edge_weyl_dirichlet(e.potential, e.length, z);
        j["kind"] = "edge_dirichlet";
        j["value"] = matrix_to_json(b.full());
        j["condition_number"] = b.cond;
      } else {
        double cond = 0.0;
        Matrix v = finite_edge_weyl_dn(e.potential, e.length, z, 1e-10, &cond);
        j["kind"] = "edge_dn";
        j["value"] = matrix_to_json(v);
        j["condition_number"] = cond;
      }
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("kappa")) {
    KappaOptions opt;
    opt.run_weyl = method != "oracle";
    opt.run_oracle = method != "weyl";
    opt.waive_nonnegativity = waive;
    opt.disc = disc;
    KappaReport rep = kappa_star(g, opt);
    ordered_json j;
    if (rep.kappa_weyl) j["kappa_weyl"] = *rep.kappa_weyl;
    if (rep.kappa_oracle) j["kappa_oracle"] = *rep.kappa_oracle;
    if (rep.bargmann_bound) j["bargmann_bound"] = *rep.bargmann_bound;
    if (rep.alpha_sum_bound) j["alpha_sum_bound"] = *rep.alpha_sum_bound;
    j["boundary_eigenvalue_count"] = rep.boundary_eigenvalue_count;
    j["nonnegativity_verified"] = rep.nonnegativity_verified;
    if (rep.T) j["T"] = matrix_to_json(*rep.T);
    std::cout << j.dump(2) << "\n";
    if (rep.kappa_weyl && rep.kappa_oracle && *rep.kappa_weyl != *rep.kappa_oracle)
      return 4;
    return 0;
  }

  if (app.got_subcommand("bargmann")) {
    ordered_json j;
    j["bargmann_bound"] = bargmann_bound(g);
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("oracle")) {
    ordered_json j;
    auto [ok, est] = nonnegativity_check(g, disc);
    j["kappa_oracle"] = kappa_oracle(g, disc);
    j["dirichlet_nonnegative"] = ok;
    j["dirichlet_bottom_estimate"] = est;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("pdet")) {
    cd zeta = parse_complex(pdet_zeta), z = parse_complex(pdet_z);
    cd d = perturbation_determinant(g, SpectralPoint::interior(zeta),
                                    SpectralPoint::interior(z));
    ordered_json j;
    j["zeta"] = complex_to_json(zeta);
    j["z"] = complex_to_json(z);
    j["delta"] = complex_to_json(d);
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("scatter")) {
    if (!(0.0 < lmin) || !(lmin <= lmax) || steps < 1)
      emit_error("OutOfRange", "need 0 < lambda-min <= lambda-max, steps >= 1", 2);
    KSum sum = ksum == "all" ? KSum::all_edges : KSum::leads_only;
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i)
      grid[i] = steps == 1 ? lmin : lmin + i * (lmax - lmin) / (steps - 1);

    struct Row {
      double lambda = 0.0;
      bool pole = false;
      Matrix S;
      double defect = 0.0;
    };
    std::vector<Row> rows(steps);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
        Row& r = rows[i];
        r.lambda = grid[i];
        try {
          auto sr = scattering_matrix(g, grid[i], sum);
          r.S = std::move(sr.S);
          r.defect = sr.unitarity_defect;
        } catch (const PoleHit&) {
          r.pole = true;
        } catch (const DirichletEigenvalueHit&) {
          r.pole = true;
        } catch (const NeumannTripletPole&) {
          r.pole = true;
        } catch (const SingularAlphaMinusK&) {
          r.pole = true;
        }
      }
    };
    int nt = std::min(n_threads(), steps);
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const int n = g.p1() * g.m;
    if (out_fmt == "csv") {
      // columns are lead-major: row block j, column block k, channels inner
      std::string header = "lambda,pole,unitarity_defect";
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          header += ",re_S_" + std::to_string(a) + "_" + std::to_string(b) +
                    ",im_S_" + std::to_string(a) + "_" + std::to_string(b);
      std::cout << header << "\n";
      for (const auto& r : rows) {
        std::string line = fmt_double(r.lambda);
        line += r.pole ? ",1," : ",0,";
        line += fmt_double(r.defect);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            cd v = r.pole ? cd(0, 0) : r.S(a, b);
            line += "," + fmt_double(v.real()) + "," + fmt_double(v.imag());
          }
        std::cout << line << "\n";
      }
    } else {
      ordered_json j = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json row;
        row["lambda"] = r.lambda;
        row["pole"] = r.pole;
        if (!r.pole) {
          row["unitarity_defect"] = r.defect;
          row["S"] = matrix_to_json(r.S);
        }
        j.push_back(std::move(row));
      }
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    int code = exit_code_for(e);
    ordered_json j;
    j["error"]["code"] = e.code();
    j["error"]["message"] = e.what();
    std::cout << j.dump(2) << "\n";
    return code;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"]["code"] = "ParseError";
    j["error"]["message"] = e.what();
    std::cout << j.dump(2) << "\n";
    return 2;
  }
}
