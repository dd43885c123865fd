#pragma once

// Spectral gap diagnostics for H(t) = (1 - t) H_S + t H_C, t in [0, 1],
// and the per-projector narrowing criterion: turning on mu |v><v| narrows
// the gap over the ground state iff <g|mu vv^dag|g> > <e|mu vv^dag|e>.

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cradle/composer.hpp"
#include "cradle/spectra.hpp"

namespace cradle {

// Bottom pairs closer than this are treated as degenerate.
inline constexpr double kGapResolution = 1e-10;
inline constexpr int kMaxSatVariables = 12;

struct Literal {
  int var = 0;  // 1-based
  bool negated = false;
};

using Clause = std::vector<Literal>;

struct SatInstance {
  int num_vars = 0;
  std::vector<Clause> clauses;

  void validate() const {
    if (num_vars < 1) throw InvalidInstance("instance needs at least one variable");
    if (num_vars > kMaxSatVariables)
      throw InvalidInstance("instance has " + std::to_string(num_vars) + " variables; the dense limit is " +
                            std::to_string(kMaxSatVariables));
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const Clause& c = clauses[i];
      if (c.empty() || c.size() > 3)
        throw InvalidInstance("clause " + std::to_string(i + 1) + " must have 1 to 3 literals");
      for (std::size_t a = 0; a < c.size(); ++a) {
        if (c[a].var < 1 || c[a].var > num_vars)
          throw InvalidInstance("clause " + std::to_string(i + 1) + " uses variable " + std::to_string(c[a].var) +
                                " out of range");
        for (std::size_t b = 0; b < a; ++b)
          if (c[a].var == c[b].var)
            throw InvalidInstance("clause " + std::to_string(i + 1) + " repeats variable " +
                                  std::to_string(c[a].var));
      }
    }
  }

  // Assignment index: variable i is bit (i - 1), set bit = true.
  bool violates(std::size_t clause, std::uint64_t assignment) const {
    for (const Literal& l : clauses[clause]) {
      const bool value = ((assignment >> (l.var - 1)) & 1u) != 0;
      if (value != l.negated) return false;
    }
    return true;
  }

  int violated_count(std::uint64_t assignment) const {
    int count = 0;
    for (std::size_t i = 0; i < clauses.size(); ++i) count += violates(i, assignment) ? 1 : 0;
    return count;
  }
};

// DIMACS CNF: comment lines 'c', one 'p cnf <vars> <clauses>' header,
// literals terminated by 0 (clauses may span lines), optional '%' trailer.
inline SatInstance parse_dimacs(std::istream& in) {
  SatInstance inst;
  bool have_header = false;
  std::size_t declared = 0;
  Clause current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "%") break;
    if (first == "p") {
      std::string format;
      long vars = 0, count = 0;
      if (have_header || !(ls >> format >> vars >> count) || format != "cnf" || vars < 1 || count < 0)
        throw InvalidInstance("line " + std::to_string(line_no) + ": bad problem line");
      inst.num_vars = static_cast<int>(std::min<long>(vars, 1 << 20));
      declared = static_cast<std::size_t>(count);
      have_header = true;
      continue;
    }
    if (!have_header) throw InvalidInstance("line " + std::to_string(line_no) + ": clause before problem line");
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      long value = 0;
      try {
        std::size_t used = 0;
        value = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidInstance("line " + std::to_string(line_no) + ": bad literal '" + tok + "'");
      }
      if (value == 0) {
        inst.clauses.push_back(current);
        current.clear();
      } else {
        current.push_back({static_cast<int>(std::labs(value)), value < 0});
      }
    }
  }
  if (!have_header) throw InvalidInstance("missing problem line");
  if (!current.empty()) throw InvalidInstance("last clause is not terminated by 0");
  if (inst.clauses.size() != declared)
    throw InvalidInstance("problem line declares " + std::to_string(declared) + " clauses, found " +
                          std::to_string(inst.clauses.size()));
  inst.validate();
  return inst;
}

inline std::string to_dimacs(const SatInstance& inst) {
  std::ostringstream out;
  out << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
  for (const Clause& c : inst.clauses) {
    for (const Literal& l : c) out << (l.negated ? -l.var : l.var) << ' ';
    out << "0\n";
  }
  return out.str();
}

// Uniform random 3-SAT: distinct variables per clause, fair signs.
inline SatInstance random_3sat(int num_vars, int num_clauses, std::uint64_t seed) {
  if (num_vars < 3) throw InvalidInstance("random 3-SAT needs at least three variables");
  if (num_clauses < 0) throw InvalidInstance("clause count must be nonnegative");
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> pick(1, num_vars);
  std::bernoulli_distribution sign(0.5);
  SatInstance inst{num_vars, {}};
  for (int i = 0; i < num_clauses; ++i) {
    Clause c;
    while (c.size() < 3) {
      const int v = pick(engine);
      bool seen = false;
      for (const Literal& l : c) seen = seen || l.var == v;
      if (!seen) c.push_back({v, sign(engine)});
    }
    inst.clauses.push_back(c);
  }
  inst.validate();
  return inst;
}

// H_C = sum_i P_i with P_i the diagonal projector onto assignments that
// violate clause i.
inline HermitianOperator build_3sat_hamiltonian(const SatInstance& inst) {
  inst.validate();
  const std::uint64_t dim = std::uint64_t{1} << inst.num_vars;
  RVector diag(static_cast<Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) diag(static_cast<Index>(b)) = inst.violated_count(b);
  return HermitianOperator::diagonal(diag);
}

// Weighted transverse field sum_i h_i (1 - X_i)/2, h_i = 1 + 2^-i. Ground
// state is the uniform superposition; the weights make every level simple.
inline HermitianOperator transverse_mixer(int num_vars) {
  if (num_vars < 1 || num_vars > kMaxSatVariables) throw InvalidInstance("mixer size out of range");
  const Index dim = Index{1} << num_vars;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int i = 0; i < num_vars; ++i) {
    const double weight = 1.0 + std::ldexp(1.0, -(i + 1));
    const Index bit = Index{1} << i;
    for (Index b = 0; b < dim; ++b) {
      h(b, b) += 0.5 * weight;
      h(b, b ^ bit) -= 0.5 * weight;
    }
  }
  return HermitianOperator(h);
}

// 1 - |+><+|: the shifted negative projector onto the uniform superposition.
// Its excited level is (2^n - 1)-fold degenerate.
inline HermitianOperator uniform_mixer(int num_vars) {
  if (num_vars < 1 || num_vars > kMaxSatVariables) throw InvalidInstance("mixer size out of range");
  const Index dim = Index{1} << num_vars;
  const CVector plus = CVector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
  return HermitianOperator(CMatrix(CMatrix::Identity(dim, dim) - plus * plus.adjoint()));
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw InputError("grid must have at least one point");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = (i + 1 == count) ? hi : lo + (hi - lo) * double(i) / double(count - 1);
  return grid;
}

struct GapPoint {
  double t = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double gap = 0.0;         // zero when flagged
  bool degenerate = false;  // E_2 - E_1 below kGapResolution
  double transition = 0.0;  // |<E_2|H_C - H_S|E_1>|, zero when flagged
};

struct AdiabaticSchedule {
  std::vector<GapPoint> points;
  double g_min = 0.0;
  double t_min = 0.0;
  double transition = 0.0;  // a, the max over unflagged points
  bool any_degenerate = false;
};

inline AdiabaticSchedule gap_trajectory(const HermitianOperator& h_s, const HermitianOperator& h_c,
                                        const std::vector<double>& grid = uniform_grid(0.0, 1.0, 201)) {
  if (h_s.dim() != h_c.dim()) throw InputError("H_S and H_C must have the same dimension");
  if (grid.empty()) throw InputError("gap grid is empty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw InputError("gap grid must be strictly ascending");
  const CMatrix r = h_c.matrix() - h_s.matrix();
  AdiabaticSchedule out;
  out.g_min = std::numeric_limits<double>::infinity();
  for (const double t : grid) {
    const HermitianOperator h = HermitianOperator::hermitian_part((1.0 - t) * h_s.matrix() + t * h_c.matrix());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    GapPoint p;
    p.t = t;
    p.e1 = solver.eigenvalues()(0);
    p.e2 = solver.eigenvalues()(1);
    const double gap = p.e2 - p.e1;
    if (gap < kGapResolution) {
      p.degenerate = true;
      out.any_degenerate = true;
    } else {
      p.gap = gap;
      p.transition = std::abs(solver.eigenvectors().col(1).dot(r * solver.eigenvectors().col(0)));
      out.transition = std::max(out.transition, p.transition);
    }
    if (p.gap < out.g_min) {
      out.g_min = p.gap;
      out.t_min = t;
    }
    out.points.push_back(p);
  }
  return out;
}

struct NarrowingReport {
  double mu = 0.0;
  double lhs = 0.0;  // |<g|v>|^2 = ds_1/dmu
  double rhs = 0.0;  // |<e|v>|^2 = ds_2/dmu
  bool narrows = false;
  bool marginal = false;  // |lhs - rhs| below kGapResolution
};

// g, e: the two lowest eigenvectors of the current operator.
inline NarrowingReport narrowing_criterion(const CVector& ground, const CVector& excited, double mu,
                                           const CVector& v) {
  NarrowingReport r;
  r.mu = mu;
  r.lhs = std::norm(ground.dot(v));
  r.rhs = std::norm(excited.dot(v));
  r.marginal = std::abs(r.lhs - r.rhs) < kGapResolution;
  // Energy form: <g|mu vv^dag|g> > <e|mu vv^dag|e>.
  r.narrows = !r.marginal && mu * (r.lhs - r.rhs) > 0.0;
  return r;
}

inline NarrowingReport narrowing_criterion(const SpectralDecomposition& state, double mu, const CVector& v) {
  if (state.eigenvalue(1) - state.eigenvalue(0) < kGapResolution)
    throw AmbiguousGap("ground and first excited levels are degenerate");
  return narrowing_criterion(state.eigenvectors().col(0), state.eigenvectors().col(1), mu, v);
}

struct ScheduleStep {
  std::size_t index = 0;  // 1-based
  double mu = 0.0;
  CVector direction;
  double gap_before = 0.0;
  double gap_after = 0.0;
  bool evaluated = false;  // bottom pair resolved at step start
  NarrowingReport criterion;
  double velocity_ground = 0.0;   // ds_1/dmu at step start
  double velocity_excited = 0.0;  // ds_2/dmu at step start
};

// Turns on R = H_C - H_S one rank-one term at a time, in the composer's
// default order, and reports the criterion at each step start.
inline std::vector<ScheduleStep> stepped_schedule(const HermitianOperator& h_s, const HermitianOperator& h_c) {
  if (h_s.dim() != h_c.dim()) throw InputError("H_S and H_C must have the same dimension");
  const std::vector<RankOneTerm> terms = rank_one_decompose(h_c - h_s);
  std::vector<ScheduleStep> out;
  CMatrix current = h_s.matrix();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const RankOneTerm& term = terms[j];
    const Eigensystem before = dense_eigensystem(HermitianOperator::hermitian_part(current));
    current += term.weight * term.direction * term.direction.adjoint();
    const Eigensystem after = dense_eigensystem(HermitianOperator::hermitian_part(current));

    ScheduleStep step;
    step.index = j + 1;
    step.mu = term.weight;
    step.direction = term.direction;
    step.gap_before = before.values(1) - before.values(0);
    step.gap_after = after.values(1) - after.values(0);
    step.criterion = narrowing_criterion(before.vectors.col(0), before.vectors.col(1), term.weight, term.direction);
    step.evaluated = step.gap_before >= kGapResolution;
    if (!step.evaluated) step.criterion.narrows = false;
    step.velocity_ground = step.criterion.lhs;
    step.velocity_excited = step.criterion.rhs;
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace cradle
