#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pevcond/closedform.hpp"
#include "pevcond/conditioning.hpp"
#include "pevcond/ensembles.hpp"
#include "pevcond/errors.hpp"
#include "pevcond/experiment.hpp"
#include "pevcond/matpoly.hpp"

namespace pevcond::io {

using Json = nlohmann::ordered_json;

/// %.17g, the round-trip format used for every float we emit.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON has no infinity; non-finite values are written as the strings "inf", "-inf", "nan".
inline Json number_or_tag(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

/// Serializes with every float at 17 significant digits.
inline void dump(const Json& j, std::ostream& os, int indent = 2, int depth = 0) {
  const auto pad = [&](int level) {
    if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: os << format_double(j.get<double>()); break;
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        break;
      }
      os << '[';
      bool first = true;
      for (const auto& el : j) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        dump(el, os, indent, depth + 1);
      }
      pad(depth);
      os << ']';
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << '{';
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        os << Json(key).dump() << (indent > 0 ? ": " : ":");
        dump(val, os, indent, depth + 1);
      }
      pad(depth);
      os << '}';
      break;
    }
    default: os << j.dump(); break;
  }
}

inline std::string dump_string(const Json& j, int indent = 2) {
  std::ostringstream os;
  dump(j, os, indent);
  return os.str();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline Matrix matrix_from_json(const Json& rows, std::size_t n) {
  if (!rows.is_array() || rows.size() != n) throw InvalidPolynomial("each matrix must have n rows");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != n) throw InvalidPolynomial("each row must have n numbers");
    for (std::size_t j = 0; j < n; ++j) {
      if (!row[j].is_number()) throw InvalidPolynomial("matrix entries must be numbers");
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// {"n": int, "d": int, "matrices": [d+1 matrices of n rows of n numbers]}
inline MatrixPolynomial polynomial_from_json(const Json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto d = j.at("d").get<std::size_t>();
    const Json& mats = j.at("matrices");
    if (n == 0 || d == 0) throw InvalidPolynomial("n and d must be positive");
    if (!mats.is_array() || mats.size() != d + 1) throw InvalidPolynomial("expected d+1 matrices");
    std::vector<Matrix> coeffs;
    for (const auto& m : mats) coeffs.push_back(matrix_from_json(m, n));
    return MatrixPolynomial(std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPolynomial(std::string("malformed polynomial document: ") + e.what());
  }
}

inline Json polynomial_to_json(const MatrixPolynomial& mp) {
  Json mats = Json::array();
  for (const auto& a : mp.coeffs()) mats.push_back(matrix_to_json(a));
  return Json{{"n", mp.n()}, {"d", mp.degree()}, {"matrices", std::move(mats)}};
}

/// {"kind": "gaussian"|"goe"|"subspace", "n": int, "d": int, "basis": optional matrices}
inline EnsembleSpec ensemble_from_json(const Json& j) {
  try {
    EnsembleSpec spec;
    spec.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
    spec.n = j.at("n").get<std::size_t>();
    spec.d = j.at("d").get<std::size_t>();
    if (j.contains("basis"))
      for (const auto& m : j.at("basis")) spec.basis.push_back(matrix_from_json(m, spec.n));
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed ensemble document: ") + e.what());
  }
}

inline Json ensemble_to_json(const EnsembleSpec& spec) {
  Json j{{"kind", std::string(to_string(spec.kind))}, {"n", spec.n}, {"d", spec.d}};
  if (spec.kind == EnsembleKind::Subspace) {
    Json basis = Json::array();
    for (const auto& b : spec.basis) basis.push_back(matrix_to_json(b));
    j["basis"] = std::move(basis);
  }
  return j;
}

inline Json condition_report_to_json(const ConditionReport& rep) {
  Json eig = Json::array();
  for (const auto& r : rep.records)
    eig.push_back(Json{{"alpha", r.point.alpha},
                       {"beta", r.point.beta},
                       {"local_mu", number_or_tag(r.local_mu)},
                       {"sigma_min", r.sigma_min},
                       {"residual", r.residual}});
  Json j{{"eigenvalues", std::move(eig)}, {"total_mu", number_or_tag(rep.total_mu)}, {"degenerate", rep.degenerate}};
  j["certified_count"] = rep.certified_count ? Json(*rep.certified_count) : Json(nullptr);
  j["cluster_warning"] = rep.cluster_warning;
  return j;
}

inline Json closed_form_to_json(const ClosedFormValue& v) {
  return Json{{"value", v.value},
              {"formula_id", std::string(to_string(v.formula_id))},
              {"n", v.n},
              {"d", v.d},
              {"k", v.k},
              {"approximate", v.approximate},
              {"formal", v.formal}};
}

inline Json report_to_json(const McReport& rep, const std::string& raw_path = {}) {
  const auto& c = rep.config;
  Json cfg{{"spec", ensemble_to_json(c.spec)},
           {"trials", c.trials},
           {"seed", c.seed},
           {"mom_blocks", c.effective_mom_blocks()},
           {"trim", c.trim},
           {"workers", c.workers}};
  Json j{{"config", std::move(cfg)},
         {"n_finite", rep.n_finite},
         {"n_infinite", rep.n_infinite},
         {"n_failed", rep.n_failed},
         {"invalid_count", rep.invalid_count()},
         {"mean", rep.est.mean},
         {"mom", rep.est.mom},
         {"mom_spread", rep.est.mom_spread},
         {"trimmed", rep.est.trimmed},
         {"stderr", rep.est.stderr_mean},
         {"ci95", Json::array({rep.est.ci95_lo, rep.est.ci95_hi})}};
  j["closed_form"] = rep.closed_form ? closed_form_to_json(*rep.closed_form) : Json(nullptr);
  j["asymptotic"] = rep.asymptotic ? closed_form_to_json(*rep.asymptotic) : Json(nullptr);
  j["bound"] = closed_form_to_json(rep.bound);
  j["elapsed_s"] = rep.elapsed_s;
  j["per_trial_path"] = raw_path.empty() ? Json(nullptr) : Json(raw_path);
  return j;
}

inline void write_raw_samples(const McReport& rep, std::ostream& os) {
  os << "trial,mu\n";
  for (std::size_t t = 0; t < rep.samples.size(); ++t) os << t << ',' << format_double(rep.samples[t]) << '\n';
}

/// {"ensembles": [...], "n": [...], "d": [...], "trials": int, "seed": int,
///  "mom_blocks": int?, "trim": float?, "workers": int?}
inline SweepGrid grid_from_json(const Json& j) {
  try {
    SweepGrid g;
    g.ensembles.clear();
    for (const auto& e : j.at("ensembles")) g.ensembles.push_back(ensemble_kind_from_string(e.get<std::string>()));
    g.ns = j.at("n").get<std::vector<std::size_t>>();
    g.ds = j.at("d").get<std::vector<std::size_t>>();
    g.trials = j.at("trials").get<std::size_t>();
    g.seed = j.value("seed", std::uint64_t{0});
    g.mom_blocks = j.value("mom_blocks", std::size_t{0});
    g.trim = j.value("trim", 0.0);
    g.workers = j.value("workers", std::size_t{1});
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed grid document: ") + e.what());
  }
}

inline constexpr const char* kSweepHeader =
    "ensemble,n,d,trials,seed,mean,stderr,mom,trimmed,closed_form,asymptotic,bound,invalid_count,elapsed_s";

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << kSweepHeader << '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    const bool ok = r.error.empty();
    const auto num = [&](double v) { return ok ? format_double(v) : std::string("nan"); };
    os << to_string(r.ensemble) << ',' << r.n << ',' << r.d << ',' << r.trials << ',' << r.seed << ',' << num(r.mean)
       << ',' << num(r.stderr_mean) << ',' << num(r.mom) << ',' << num(r.trimmed) << ',' << opt(r.closed_form) << ','
       << opt(r.asymptotic) << ',' << num(r.bound) << ',' << r.invalid_count << ',' << format_double(r.elapsed_s)
       << '\n';
  }
}

}  // namespace pevcond::io
