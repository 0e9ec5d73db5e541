#pragma once

// JSON formats: tightbell-game-v1, tightbell-behaviour-v1, tightbell-nlc-v1,
// plus the report objects written by the command-line tool. Exact values are
// written as rational strings ("p/q"), certified numeric values as numbers.

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "tightbell/classical.hpp"
#include "tightbell/error.hpp"
#include "tightbell/facegeom.hpp"
#include "tightbell/game.hpp"
#include "tightbell/nlc.hpp"
#include "tightbell/qsdp.hpp"

namespace tightbell {

using json = nlohmann::ordered_json;

inline constexpr const char* kGameFormat = "tightbell-game-v1";
inline constexpr const char* kBehaviourFormat = "tightbell-behaviour-v1";
inline constexpr const char* kNlcFormat = "tightbell-nlc-v1";

namespace detail {

template <class Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

inline void expect_format(const json& j, const char* format) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "expected a JSON object");
  if (j.contains("format") && j.at("format").get<std::string>() != format)
    throw Error(ErrorCode::parse_error, "unexpected format '" + j.at("format").get<std::string>() + "'");
}

inline Rational rational_from(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw Error(ErrorCode::parse_error, "rational entries must be strings such as \"1/4\" or \"0.25\"");
}

inline json strings_of(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline json game_to_json(const XorGame& g) {
  json j;
  j["format"] = kGameFormat;
  j["m_a"] = g.m_a();
  j["m_b"] = g.m_b();
  json q = json::array(), f = json::array();
  for (std::size_t x = 0; x < g.m_a(); ++x) {
    json qr = json::array(), fr = json::array();
    for (std::size_t y = 0; y < g.m_b(); ++y) {
      qr.push_back(to_string(g.q()(x, y)));
      fr.push_back(static_cast<int>(g.f()(x, y)));
    }
    q.push_back(std::move(qr));
    f.push_back(std::move(fr));
  }
  j["q"] = std::move(q);
  j["f"] = std::move(f);
  return j;
}

inline XorGame game_from_json(const json& j) {
  return detail::guarded([&] {
    detail::expect_format(j, kGameFormat);
    const auto ma = j.at("m_a").get<std::size_t>();
    const auto mb = j.at("m_b").get<std::size_t>();
    const json& q = j.at("q");
    const json& f = j.at("f");
    if (!q.is_array() || !f.is_array() || q.size() != ma || f.size() != ma)
      throw Error(ErrorCode::shape_mismatch, "q and f must have m_a rows");
    RationalMatrix qm(ma, mb);
    BitMatrix fm(ma, mb);
    for (std::size_t x = 0; x < ma; ++x) {
      if (!q[x].is_array() || !f[x].is_array() || q[x].size() != mb || f[x].size() != mb)
        throw Error(ErrorCode::shape_mismatch, "q and f rows must have m_b entries");
      for (std::size_t y = 0; y < mb; ++y) {
        qm(x, y) = detail::rational_from(q[x][y]);
        const int bit = f[x][y].get<int>();
        if (bit != 0 && bit != 1) throw Error(ErrorCode::parse_error, "f entries must be 0 or 1");
        fm(x, y) = static_cast<std::uint8_t>(bit);
      }
    }
    return build_game(std::move(qm), std::move(fm));
  });
}

inline json behaviour_to_json(const Behaviour& b) {
  json j;
  j["format"] = kBehaviourFormat;
  j["alpha"] = b.alpha;
  j["beta"] = b.beta;
  json c = json::array();
  for (std::size_t x = 0; x < b.c.rows(); ++x) {
    json row = json::array();
    for (std::size_t y = 0; y < b.c.cols(); ++y) row.push_back(b.c(x, y));
    c.push_back(std::move(row));
  }
  j["c"] = std::move(c);
  return j;
}

inline Behaviour behaviour_from_json(const json& j) {
  return detail::guarded([&] {
    detail::expect_format(j, kBehaviourFormat);
    Behaviour b;
    b.alpha = j.at("alpha").get<std::vector<double>>();
    b.beta = j.at("beta").get<std::vector<double>>();
    const auto rows = j.at("c").get<std::vector<std::vector<double>>>();
    if (rows.size() != b.alpha.size()) throw Error(ErrorCode::shape_mismatch, "c must have len(alpha) rows");
    b.c = Matrix<double>(b.alpha.size(), b.beta.size());
    for (std::size_t x = 0; x < rows.size(); ++x) {
      if (rows[x].size() != b.beta.size()) throw Error(ErrorCode::shape_mismatch, "c rows must have len(beta) entries");
      for (std::size_t y = 0; y < rows[x].size(); ++y) b.c(x, y) = rows[x][y];
    }
    return b;
  });
}

inline json nlc_spec_to_json(const NlcSpec& s) {
  json j;
  j["format"] = kNlcFormat;
  j["n"] = s.n;
  j["q_tilde"] = detail::strings_of(s.q_tilde);
  json f = json::array();
  for (auto bit : s.f_z) f.push_back(static_cast<int>(bit));
  j["f_z"] = std::move(f);
  return j;
}

inline NlcSpec nlc_spec_from_json(const json& j) {
  return detail::guarded([&] {
    detail::expect_format(j, kNlcFormat);
    NlcSpec s;
    s.n = j.at("n").get<unsigned>();
    for (const auto& v : j.at("q_tilde")) s.q_tilde.push_back(detail::rational_from(v));
    for (const auto& v : j.at("f_z")) {
      const int bit = v.get<int>();
      if (bit != 0 && bit != 1) throw Error(ErrorCode::invalid_spec, "f_z entries must be 0 or 1");
      s.f_z.push_back(static_cast<std::uint8_t>(bit));
    }
    validate(s);
    return s;
  });
}

inline json strategy_to_json(const DeterministicStrategy& s) { return json{{"alpha", s.alpha}, {"beta", s.beta}}; }

inline json classical_to_json(const ClassicalBiasResult& r) {
  json j;
  j["xi_c"] = to_string(r.xi_c);
  j["omega_c"] = to_string((1 + r.xi_c) / 2);
  j["witness"] = strategy_to_json(r.witness);
  j["num_alpha_optimal"] = r.num_alpha_optimal;
  j["enumerated_side"] = r.transposed ? "bob" : "alice";
  j["value_kind"] = "exact";
  return j;
}

/// The certificate fields an external checker needs, plus solver bookkeeping.
inline json certificate_to_json(const QuantumBiasResult& r) {
  json j;
  j["xi_q"] = r.xi_q;
  j["dual_value"] = r.dual_value;
  j["gap"] = r.gap;
  j["t"] = std::vector<double>(r.cert.t.data(), r.cert.t.data() + r.cert.t.size());
  j["min_eig"] = r.cert.min_eig;
  j["classification"] = to_string(r.classification);
  j["status"] = to_string(r.status);
  if (r.xi_c) j["xi_c"] = to_string(*r.xi_c);
  j["dual_shift"] = r.cert.shift;
  j["restart"] = r.restart;
  j["sweeps"] = r.sweeps;
  j["stalls"] = r.stalls;
  j["value_kind"] = "certified_numeric";
  return j;
}

inline json face_report_to_json(const FaceReport& r) {
  const std::string prov(to_string(r.provenance));
  json j;
  j["xi_c"] = to_string(r.xi_c);
  j["xi_q"] = r.quantum ? json(r.quantum->xi_q) : json(nullptr);
  j["classification"] = to_string(r.classification);
  j["original_dims"] = {r.original_dims.first, r.original_dims.second};
  j["reduced_dims"] = {r.reduced_dims.first, r.reduced_dims.second};
  j["transposed"] = r.transposed;
  j["D"] = r.D;
  j["num_vertices"] = r.num_vertices;
  j["dim_full"] = {{"value", r.dim_full}, {"provenance", prov}};
  j["dim_corr"] = {{"value", r.dim_corr}, {"provenance", prov}};
  j["codim_full"] = {{"value", r.codim_full}, {"provenance", prov}};
  j["codim_corr"] = {{"value", r.codim_corr}, {"provenance", prov}};
  j["bound_thm1_dim"] = r.bound_thm1_dim;
  j["bound_thm1_dim_corr"] = r.bound_thm1_dim_corr;
  j["bound_exhaustive_codim"] = r.bound_exhaustive_codim;
  j["bound_thm2_codim"] = {{"full", r.bound_thm2_codim.full}, {"correlation", r.bound_thm2_codim.correlation}};
  j["is_facet_full"] = r.is_facet_full ? json(*r.is_facet_full) : json(nullptr);
  j["is_facet_corr"] = r.is_facet_corr ? json(*r.is_facet_corr) : json(nullptr);
  j["truncated"] = r.truncated;
  if (r.truncated) j["note"] = "vertex set truncated: dimensions are lower bounds and facet verdicts are suppressed";
  j["certificate"] = r.quantum ? certificate_to_json(*r.quantum) : json(nullptr);
  j["value_kinds"] = {{"xi_c", "exact"}, {"xi_q", "certified_numeric"}, {"dimensions", "exact"}};
  return j;
}

inline json nlc_analysis_to_json(const NlcAnalysis& a) {
  json j;
  j["n"] = a.n;
  j["spectrum"] = detail::strings_of(a.spectrum);
  j["lambda_norm"] = to_string(a.lambda_norm);
  j["operator_norm_game"] = to_string(a.lambda_norm / (std::size_t{1} << a.n));
  j["k"] = a.k;
  j["l"] = a.l;
  if (a.k + a.l > 0) j["kl_dim_bound"] = kl_dimension_bound(a.k, a.l);
  j["diagonalization_verified"] = a.diagonalization_verified;
  j["value_kind"] = "exact";
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

}  // namespace tightbell
