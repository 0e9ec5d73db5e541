// tightbell: command-line front end for XOR-game face analysis.
//
// Exit codes: 0 success, 1 invalid input, 2 resource cap exceeded,
// 3 certification failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tightbell/io.hpp"
#include "tightbell/tightbell.hpp"

namespace {

using namespace tightbell;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCap = 2;
constexpr int kExitCertification = 3;

struct RunConfig {
  std::uint64_t seed = 0;
  unsigned restarts = 8;
  std::size_t max_iters = 200000;
  double gap_tol = 1e-7;
  double feas_tol = 1e-8;
  double adv_tol = 1e-6;
  double slack_tol = 1e-6;
  std::uint64_t enum_cap = std::uint64_t{1} << 24;
  std::size_t vertex_cap = 1'000'000;
  std::string space = "full";
  std::string output;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::too_large:
    case ErrorCode::truncated: return kExitCap;
    case ErrorCode::not_converged:
    case ErrorCode::dual_infeasible: return kExitCertification;
    default: return kExitInvalid;
  }
}

void validate(const RunConfig& rc) {
  if (!(rc.gap_tol > 0 && rc.feas_tol > 0 && rc.adv_tol > 0 && rc.slack_tol > 0))
    throw Error(ErrorCode::invalid_parameter, "tolerances must be positive");
  if (rc.enum_cap == 0 || rc.vertex_cap == 0 || rc.restarts == 0 || rc.max_iters == 0)
    throw Error(ErrorCode::invalid_parameter, "caps and restarts must be positive");
}

ClassicalConfig classical_config(const RunConfig& rc) {
  ClassicalConfig c;
  c.max_enum_bits = static_cast<unsigned>(std::floor(std::log2(static_cast<double>(rc.enum_cap))));
  c.vertex_cap = rc.vertex_cap;
  return c;
}

SolverConfig solver_config(const RunConfig& rc) {
  SolverConfig s;
  s.seed = rc.seed;
  s.restarts = rc.restarts;
  s.max_iters = rc.max_iters;
  s.gap_tol = rc.gap_tol;
  s.feas_tol = rc.feas_tol;
  s.adv_tol = rc.adv_tol;
  s.classical_enum_bits = classical_config(rc).max_enum_bits;
  return s;
}

void emit(const json& report, const RunConfig& rc) {
  if (rc.output.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(rc.output);
  if (!out) throw Error(ErrorCode::parse_error, "cannot write '" + rc.output + "'");
  out << report.dump(2) << "\n";
}

void add_common(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--seed", rc.seed, "Seed for the SDP restarts");
  cmd->add_option("--restarts", rc.restarts, "Random restarts of the SDP solver");
  cmd->add_option("--max-iters", rc.max_iters, "Sweep budget per SDP restart");
  cmd->add_option("--gap-tol", rc.gap_tol, "Duality gap tolerance");
  cmd->add_option("--feas-tol", rc.feas_tol, "Dual feasibility tolerance");
  cmd->add_option("--adv-tol", rc.adv_tol, "Quantum advantage tolerance");
  cmd->add_option("--slack-tol", rc.slack_tol, "Complementary slackness tolerance");
  cmd->add_option("--enum-cap", rc.enum_cap, "Maximum number of enumerated sign vectors");
  cmd->add_option("--vertex-cap", rc.vertex_cap, "Maximum number of stored optimal vertices");
  cmd->add_option("--space", rc.space, "Headline space for facet verdicts")->check(CLI::IsMember({"full", "correlation"}));
  cmd->add_option("-o,--output", rc.output, "Write the report here instead of stdout");
}

json quantum_report(const QuantumBiasResult& r) { return certificate_to_json(r); }

int run_bias(const std::string& kind, const std::string& path, const RunConfig& rc) {
  const XorGame g = game_from_json(read_json_file(path));
  if (kind == "classical") {
    emit(classical_to_json(classical_bias(g, classical_config(rc))), rc);
    return kExitOk;
  }
  const auto [reduced, map] = reduce_exhaustive(g);
  const QuantumBiasResult r = solve_quantum_bias(reduced, solver_config(rc));
  json report = quantum_report(r);
  report["reduced_dims"] = {reduced.m_a(), reduced.m_b()};
  emit(report, rc);
  return r.certified() ? kExitOk : kExitCertification;
}

FaceConfig face_config(const RunConfig& rc) {
  FaceConfig fc;
  fc.classical = classical_config(rc);
  fc.solver = solver_config(rc);
  return fc;
}

bool is_identity_game(const XorGame& g) {
  if (g.m_a() != g.m_b() || !std::has_single_bit(g.m_a()) || g.m_a() < 2) return false;
  const unsigned n = static_cast<unsigned>(std::countr_zero(g.m_a()));
  return g == make_identity(n);
}

int run_face(const std::string& path, const RunConfig& rc) {
  const XorGame g = game_from_json(read_json_file(path));
  const FaceReport r = face_report(g, face_config(rc));
  json report = face_report_to_json(r);
  report["space"] = rc.space;
  const auto& headline = rc.space == "full" ? r.is_facet_full : r.is_facet_corr;
  report["is_facet"] = headline ? json(*headline) : json(nullptr);
  if (is_identity_game(g)) {
    const unsigned n = static_cast<unsigned>(std::countr_zero(g.m_a()));
    const CorollaryBound cb = corollary_bound(n);
    if (r.dim_full == cb.dim_bound)
      report["note"] = "identity game: dim_full attains the NLC dimension bound 2^n + 2^(n-1)(2^n-1) with equality";
  }
  emit(report, rc);
  if (r.truncated) return kExitCap;
  if (r.quantum && !r.quantum->certified()) return kExitCertification;
  return kExitOk;
}

int run_trivial_facet(std::size_t ma, std::size_t mb, std::size_t x0, std::size_t y0, const std::string& sign,
                      const RunConfig& rc) {
  int s = 0;
  if (sign == "+" || sign == "+1" || sign == "1") s = 1;
  if (sign == "-" || sign == "-1") s = -1;
  if (s == 0) throw Error(ErrorCode::invalid_parameter, "sign must be + or -");
  const TrivialFacetReport r = trivial_facet_check(ma, mb, x0, y0, s);
  emit(json{{"m_a", ma}, {"m_b", mb}, {"x0", x0}, {"y0", y0}, {"sign", s}, {"dim", r.dim}, {"is_facet", r.is_facet},
            {"num_points", r.num_points}},
       rc);
  return kExitOk;
}

NlcSpec load_nlc(const std::string& path) {
  const json j = read_json_file(path);
  if (j.contains("format") && j.at("format") == kNlcFormat) return nlc_spec_from_json(j);
  const XorGame g = game_from_json(j);
  auto spec = nlc_spec_from_game(g);
  if (!spec) throw Error(ErrorCode::invalid_spec, "game is not an NLC game (q, f must depend on x xor y only)");
  return *spec;
}

int run_verify(const std::string& path, const RunConfig& rc) {
  const XorGame g = reduce_exhaustive(game_from_json(read_json_file(path))).first;
  const QuantumBiasResult q = solve_quantum_bias(g, solver_config(rc));
  json report;
  report["certificate"] = certificate_to_json(q);
  if (!q.certified()) {
    emit(report, rc);
    return kExitCertification;
  }
  const OptimalVertexSet vs = optimal_vertices(g, classical_config(rc));
  double max_slack = 0.0;
  for (const auto& v : vs.vertices) max_slack = std::max(max_slack, slackness_residual_classical(q.cert, g, v));
  report["num_vertices"] = vs.vertices.size();
  report["slackness_max_residual"] = max_slack;
  report["slackness_pass"] = max_slack <= rc.slack_tol;
  if (q.classification == Classification::no_advantage) {
    const Eigen::MatrixXd F = extract_F(q.cert, g, rc.feas_tol);
    report["F"] = detail::matrix_json(F);
    if (!vs.truncated) {
      const FRelationReport fr = verify_F_relation(vs, F, rc.slack_tol);
      report["F_relation"] = {{"max_residual", fr.max_residual}, {"all_pass", fr.all_pass}};
    }
    const QuantumSlackReport qs = quantum_slackness_check(q, F, rc.slack_tol);
    report["quantum_slackness"] = {{"max_residual", qs.max_residual}, {"pass", qs.pass}};
  }
  emit(report, rc);
  return vs.truncated ? kExitCap : kExitOk;
}

int run_probe(const std::string& path, std::size_t samples, const RunConfig& rc) {
  const XorGame g = game_from_json(read_json_file(path));
  ProbeConfig pc;
  pc.samples = samples;
  const QuantumFaceProbe p = quantum_face_probe(g, pc, solver_config(rc));
  emit(json{{"dim_lower_bound", p.dim_lower_bound},
            {"thm3_bound", p.thm3_bound},
            {"accepted_samples", p.accepted_samples},
            {"bound_respected", p.bound_respected},
            {"note", "sampled optima give a lower bound on the optimal quantum face dimension"}},
       rc);
  return kExitOk;
}

int run_family(const std::string& name, unsigned min_n, unsigned max_n, const RunConfig& rc) {
  const NamedGame which = parse_named_game(name);
  if (min_n > max_n) throw Error(ErrorCode::invalid_parameter, "min-n exceeds max-n");
  json points = json::array();
  int code = kExitOk;
  for (unsigned n = min_n; n <= max_n; ++n) {
    const FaceReport r = face_report(make_named(which, n), face_config(rc));
    json p{{"n", n},
           {"xi_c", to_string(r.xi_c)},
           {"num_vertices", r.num_vertices},
           {"dim_full", r.dim_full},
           {"dim_corr", r.dim_corr},
           {"codim_full", r.codim_full},
           {"bound_thm1_dim", r.bound_thm1_dim},
           {"classification", to_string(r.classification)}};
    points.push_back(std::move(p));
    if (r.truncated) code = kExitCap;
    if (r.quantum && !r.quantum->certified()) code = kExitCertification;
  }
  emit(json{{"family", name}, {"points", points}}, rc);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical and quantum analysis of XOR games and the faces they define"};
  app.require_subcommand(1);
  RunConfig rc;

  std::string name, path, kind, sign = "+", nlc_cmd, spec_path;
  unsigned n = 1, min_n = 1, max_n = 3;
  std::size_t ma = 2, mb = 2, x0 = 0, y0 = 0, k = 1, l = 0, samples = 24;

  auto* make = app.add_subcommand("make", "Write a named game (chsh, identity, nlc-and, appendixd, single-entry, nlc)");
  make->add_option("name", name)->required();
  make->add_option("--n", n, "Number of input bits");
  make->add_option("--spec", spec_path, "NLC spec file (for name 'nlc')");
  make->add_option("-o,--output", rc.output);

  auto* bias = app.add_subcommand("bias", "Classical or certified quantum bias");
  bias->add_option("kind", kind)->required()->check(CLI::IsMember({"classical", "quantum"}));
  bias->add_option("game", path)->required();
  add_common(bias, rc);

  auto* face = app.add_subcommand("face", "Exact face dimensions, bounds and facet verdicts");
  face->add_option("game", path)->required();
  add_common(face, rc);

  auto* verify = app.add_subcommand("verify", "Dual certificate, coupling matrix and slackness checks");
  verify->add_option("game", path)->required();
  add_common(verify, rc);

  auto* probe = app.add_subcommand("probe", "Sampled lower bound on the optimal quantum face dimension");
  probe->add_option("game", path)->required();
  probe->add_option("--samples", samples);
  add_common(probe, rc);

  auto* family = app.add_subcommand("family", "Face dimensions along a named game family");
  family->add_option("name", name)->required();
  family->add_option("--min-n", min_n);
  family->add_option("--max-n", max_n);
  add_common(family, rc);

  auto* trivial = app.add_subcommand("trivial-facet", "Dimension of the face c(x0,y0) = sign of the correlation polytope");
  trivial->add_option("--ma", ma)->required();
  trivial->add_option("--mb", mb)->required();
  trivial->add_option("--x0", x0)->required();
  trivial->add_option("--y0", y0)->required();
  trivial->add_option("--sign", sign);
  trivial->add_option("-o,--output", rc.output);

  auto* nlc = app.add_subcommand("nlc", "Non-local computation analyses");
  nlc->add_option("what", nlc_cmd, "spectrum | bound | g0 | corollary | kl")
      ->required()
      ->check(CLI::IsMember({"spectrum", "bound", "g0", "corollary", "kl"}));
  nlc->add_option("file", path, "NLC spec or game file (spectrum, bound)");
  nlc->add_option("--n", n);
  nlc->add_option("--k", k);
  nlc->add_option("--l", l);
  add_common(nlc, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    validate(rc);
    if (*make) {
      json out;
      if (name == "nlc") {
        if (spec_path.empty()) throw Error(ErrorCode::invalid_parameter, "make nlc needs --spec");
        out = game_to_json(build_nlc(nlc_spec_from_json(read_json_file(spec_path))));
      } else {
        out = game_to_json(make_named(name, n));
      }
      emit(out, rc);
      return kExitOk;
    }
    if (*bias) return run_bias(kind, path, rc);
    if (*face) return run_face(path, rc);
    if (*verify) return run_verify(path, rc);
    if (*probe) return run_probe(path, samples, rc);
    if (*family) return run_family(name, min_n, max_n, rc);
    if (*trivial) return run_trivial_facet(ma, mb, x0, y0, sign, rc);
    if (*nlc) {
      if (nlc_cmd == "spectrum" || nlc_cmd == "bound") {
        if (path.empty()) throw Error(ErrorCode::invalid_parameter, "nlc " + nlc_cmd + " needs a file");
        const NlcSpec spec = load_nlc(path);
        const NlcAnalysis a = hadamard_spectrum(spec);
        json out = nlc_analysis_to_json(a);
        if (nlc_cmd == "bound") {
          const NlcBiasBound b = nlc_bias_bound(a, build_nlc(spec), classical_config(rc));
          out["xi_star"] = to_string(b.xi_star);
          out["xi_c"] = to_string(b.xi_c);
          out["matches_classical"] = b.matches_classical;
        }
        emit(out, rc);
      } else if (nlc_cmd == "g0") {
        const G0Dimension d = g0_dimension(n);
        emit(json{{"n", n},
                  {"formula", d.formula_value},
                  {"verified", d.verified_value},
                  {"balanced_vectors", d.balanced_vectors},
                  {"face_dim_with_antipodal", d.face_dim_with_antipodal}},
             rc);
      } else if (nlc_cmd == "corollary") {
        json points = json::array();
        for (unsigned i = 1; i <= n; ++i) {
          const CorollaryBound b = corollary_bound(i);
          points.push_back(json{{"n", i},
                                {"dim_bound", b.dim_bound},
                                {"codim_bound_full", b.codim_bound_full},
                                {"codim_bound_corr", b.codim_bound_corr}});
        }
        const CorollaryBound b = corollary_bound(n);
        emit(json{{"n", n},
                  {"dim_bound", b.dim_bound},
                  {"codim_bound_full", b.codim_bound_full},
                  {"codim_bound_corr", b.codim_bound_corr},
                  {"points", points}},
             rc);
      } else {
        emit(json{{"k", k}, {"l", l}, {"kl_dim_bound", kl_dimension_bound(k, l)}}, rc);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "tightbell: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tightbell: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
