#pragma once

// File formats. Every failure to read or validate input surfaces as
// InputError. Reals are printed with 17 significant digits, which round
// trips; infinities appear as the strings "inf" and "-inf".

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cradle/adiabatic.hpp"
#include "cradle/composer.hpp"
#include "cradle/kernel.hpp"
#include "cradle/sampling.hpp"
#include "cradle/secular.hpp"
#include "cradle/unitary.hpp"

namespace cradle::io {

using json = nlohmann::ordered_json;

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_real(const ExtendedReal& x) {
  if (x.is_finite()) return format_real(x.value());
  return x.kind() == ExtendedReal::Kind::positive_infinity ? "inf" : "-inf";
}

// Parses our own output, sentinels included.
inline double parse_real(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw InputError("not a number: '" + text + "'");
  return value;
}

// JSON numbers are written losslessly; non-finite values become sentinels.
inline json real_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

inline json real_to_json(const ExtendedReal& x) {
  return x.is_finite() ? json(x.value()) : json(format_real(x));
}

inline double real_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw InputError(what + " must be a number");
}

inline json reals_to_json(const RVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(real_to_json(v(i)));
  return out;
}

inline RVector reals_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  RVector out(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Index>(i)) = real_from_json(j[i], what);
  return out;
}

// ---------------------------------------------------------------------------

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(origin + ": malformed JSON (" + e.what() + ")");
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json read_json(const std::string& path) { return parse_json(read_text(path), path); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

// {"dim": N, "re": [[...]], "im": [[...]]}, row-major; "im" may be omitted.
inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re"))
    throw InputError("matrix JSON needs \"dim\" and \"re\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) throw InputError("matrix \"dim\" must be a positive integer");
  const Index n = j["dim"].get<Index>();
  const auto part = [&](const char* key) {
    RMatrix m = RMatrix::Zero(n, n);
    if (!j.contains(key)) return m;
    const json& rows = j[key];
    if (!rows.is_array() || Index(rows.size()) != n)
      throw InputError(std::string("matrix \"") + key + "\" must have " + std::to_string(n) + " rows");
    for (Index r = 0; r < n; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || Index(row.size()) != n)
        throw InputError(std::string("matrix \"") + key + "\" row " + std::to_string(r) + " must have " +
                         std::to_string(n) + " entries");
      for (Index c = 0; c < n; ++c) m(r, c) = real_from_json(row[static_cast<std::size_t>(c)], "matrix entry");
    }
    return m;
  };
  const RMatrix re = part("re");
  const RMatrix im = part("im");
  CMatrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

inline json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return json{{"dim", m.rows()}, {"re", re}, {"im", im}};
}

// {"re": [...], "im": [...]}; "im" may be omitted.
inline CVector vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re")) throw InputError("vector JSON needs \"re\"");
  const RVector re = reals_from_json(j["re"], "vector \"re\"");
  RVector im = RVector::Zero(re.size());
  if (j.contains("im")) {
    im = reals_from_json(j["im"], "vector \"im\"");
    if (im.size() != re.size()) throw InputError("vector \"re\" and \"im\" differ in length");
  }
  CVector out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

inline json vector_to_json(const CVector& v) {
  return json{{"re", reals_to_json(v.real())}, {"im", reals_to_json(v.imag())}};
}

inline HermitianOperator read_hermitian(const std::string& path) {
  return HermitianOperator(matrix_from_json(read_json(path)));
}

inline UnitaryOperator read_unitary(const std::string& path) {
  return UnitaryOperator(matrix_from_json(read_json(path)));
}

inline CVector read_vector(const std::string& path) { return vector_from_json(read_json(path)); }

inline SatInstance read_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_dimacs(in);
}

// ---------------------------------------------------------------------------

namespace detail {

inline void csv_header(std::ostream& out, const std::string& first, const std::vector<std::string>& groups, Index n,
                       const std::string& last = "") {
  out << first;
  for (const std::string& g : groups)
    for (Index k = 1; k <= n; ++k) out << ',' << g << k;
  if (!last.empty()) out << ',' << last;
  out << '\n';
}

inline void csv_values(std::ostream& out, const RVector& v) {
  for (Index k = 0; k < v.size(); ++k) out << ',' << format_real(v(k));
}

}  // namespace detail

// mu, s_1..s_N, vel_1..vel_N
inline void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  const Index n = t.eigenvalues.empty() ? 0 : t.eigenvalues.front().size();
  detail::csv_header(out, "mu", {"s_", "vel_"}, n);
  for (std::size_t i = 0; i < t.mu.size(); ++i) {
    out << format_real(t.mu[i]);
    detail::csv_values(out, t.eigenvalues[i]);
    detail::csv_values(out, t.velocities[i]);
    out << '\n';
  }
}

// Asymptotes of the active levels, the escaping level's limit as "inf",
// and the levels that never move.
inline json asymptotes_to_json(const CradleConfig& cradle) {
  const Asymptotes a = asymptotes(cradle);
  json limits = json::array();
  for (Index k = 0; k < a.size(); ++k) limits.push_back(a.values(k));
  limits.push_back("inf");
  json frozen = json::array();
  for (const Index n : cradle.frozen_levels()) frozen.push_back(json{{"level", n + 1}, {"s", cradle.base().eigenvalue(n)}});
  return json{{"asymptotes", limits}, {"frozen", frozen}};
}

// s, k_1..k_N
inline void write_kernel_csv(std::ostream& out, const CradleConfig& cradle, const std::vector<double>& grid) {
  detail::csv_header(out, "s", {"k_"}, cradle.dim());
  for (const double s : grid) {
    out << format_real(s);
    detail::csv_values(out, evaluate_kernel(cradle, s).signed_row);
    out << '\n';
  }
}

// alpha, phase_1..phase_N, mu. A row at alpha* is inserted with mu = inf.
inline void write_phase_csv(std::ostream& out, const UnitaryCradle& uc, const std::vector<double>& grid) {
  detail::csv_header(out, "alpha", {"phase_"}, uc.dim(), "mu");
  const double star = uc.alpha_star();
  bool star_written = false;
  const auto row = [&](double alpha) {
    out << format_real(alpha);
    detail::csv_values(out, eigenphases_at(uc, alpha));
    out << ',' << format_real(mu_of_alpha(uc, alpha)) << '\n';
  };
  for (const double alpha : grid) {
    if (!star_written && alpha >= star) {
      if (alpha != star) row(star);
      star_written = true;
    }
    row(alpha);
  }
}

inline json step_log_to_json(const ComposeResult& r) {
  json steps = json::array();
  for (const CradleStep& s : r.steps)
    steps.push_back(json{{"j", s.index},
                         {"mu", s.weight},
                         {"eigenvalues_before", reals_to_json(s.eigenvalues_before)},
                         {"eigenvalues_after", reals_to_json(s.eigenvalues_after)},
                         {"min_gap", real_to_json(s.min_gap)}});
  return json{{"steps", steps}, {"eigenvalues", reals_to_json(r.final_state.eigenvalues())}};
}

inline json signal_to_json(const SampledSignal& sig) {
  return json{{"mu", sig.mu}, {"nodes", reals_to_json(sig.nodes)}, {"amplitudes", reals_to_json(sig.amplitudes)}};
}

inline SampledSignal signal_from_json(const json& j) {
  if (!j.is_object() || !j.contains("mu") || !j.contains("nodes") || !j.contains("amplitudes"))
    throw InputError("signal JSON needs \"mu\", \"nodes\" and \"amplitudes\"");
  SampledSignal sig;
  sig.mu = real_from_json(j["mu"], "signal \"mu\"");
  sig.nodes = reals_from_json(j["nodes"], "signal \"nodes\"");
  sig.amplitudes = reals_from_json(j["amplitudes"], "signal \"amplitudes\"");
  if (sig.nodes.size() != sig.amplitudes.size()) throw InputError("signal nodes and amplitudes differ in length");
  return sig;
}

// s, f
inline void write_reconstruction_csv(std::ostream& out, const std::vector<double>& grid, const RVector& values) {
  out << "s,f\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << format_real(grid[i]) << ',' << format_real(values(static_cast<Index>(i))) << '\n';
}

// t, E1, E2, gap
inline void write_schedule_csv(std::ostream& out, const AdiabaticSchedule& s) {
  out << "t,E1,E2,gap\n";
  for (const GapPoint& p : s.points)
    out << format_real(p.t) << ',' << format_real(p.e1) << ',' << format_real(p.e2) << ',' << format_real(p.gap)
        << '\n';
}

inline json schedule_summary_to_json(const AdiabaticSchedule& s) {
  json flagged = json::array();
  for (const GapPoint& p : s.points)
    if (p.degenerate) flagged.push_back(p.t);
  return json{{"g_min", s.g_min}, {"t_min", s.t_min}, {"a", s.transition}, {"degenerate_t", flagged}};
}

inline json step_report_to_json(const std::vector<ScheduleStep>& steps) {
  json out = json::array();
  for (const ScheduleStep& s : steps) {
    json narrows = s.evaluated && !s.criterion.marginal ? json(s.criterion.narrows) : json(nullptr);
    out.push_back(json{{"j", s.index},
                       {"mu", s.mu},
                       {"ground_overlap", s.criterion.lhs},
                       {"excited_overlap", s.criterion.rhs},
                       {"narrows", narrows},
                       {"marginal", s.criterion.marginal},
                       {"velocity_ground", s.velocity_ground},
                       {"velocity_excited", s.velocity_excited},
                       {"gap_before", s.gap_before},
                       {"gap_after", s.gap_after},
                       {"gap_change", s.gap_after - s.gap_before}});
  }
  return out;
}

}  // namespace cradle::io
