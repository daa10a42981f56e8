#include "sparsedens/solvers.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparsedens {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Dantzig: return "dantzig";
    case Method::Lasso: return "lasso";
    case Method::DantzigNonAdaptive: return "dantzig-na";
    case Method::DantzigLS: return "dantzig-ls";
    case Method::SoftThreshold: return "soft-threshold";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "dantzig") return Method::Dantzig;
  if (name == "lasso") return Method::Lasso;
  if (name == "dantzig-na" || name == "dantzig-nonadaptive") return Method::DantzigNonAdaptive;
  if (name == "dantzig-ls") return Method::DantzigLS;
  if (name == "soft-threshold" || name == "soft") return Method::SoftThreshold;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::MaxIter: return "max-iter";
    case SolverStatus::Infeasible: return "infeasible";
  }
  return "?";
}

void DantzigProblem::validate() const {
  const auto m = gram.size();
  if (m == 0) throw std::invalid_argument("empty Dantzig problem");
  if (beta_hat.size() != m || eta.size() != m)
    throw std::invalid_argument("Dantzig problem dimensions disagree: G is " + std::to_string(m) + ", beta_hat " +
                                std::to_string(beta_hat.size()) + ", eta " + std::to_string(eta.size()));
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(eta[i] > 0.0) || !std::isfinite(eta[i])) throw std::invalid_argument("eta must be finite and positive");
  if (!beta_hat.allFinite()) throw std::invalid_argument("beta_hat must be finite");
}

CoefficientVector CoefficientVector::from_values(Eigen::VectorXd values, Method method, double support_tol) {
  CoefficientVector c;
  c.method = method;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) <= support_tol) {
      values[i] = 0.0;
    } else {
      c.support.push_back(static_cast<std::size_t>(i));
      c.l1_norm += std::abs(values[i]);
    }
  }
  c.values = std::move(values);
  return c;
}

double dantzig_violation(const DantzigProblem& problem, const Eigen::VectorXd& lambda) {
  const Eigen::VectorXd r = problem.gram.matrix() * lambda - problem.beta_hat;
  return std::max(0.0, (r.cwiseAbs() - problem.eta).maxCoeff());
}

namespace {

// Variable identifiers used for Bland's rule: lambda+_q -> 2q, lambda-_q -> 2q+1,
// residual r_t -> 2M + t.
struct Candidate {
  Eigen::Index id = -1;
  double ratio = 0.0;
  double alpha = 0.0;
  bool residual = false;
  Eigen::Index index = -1;  // coefficient q, or position of t within T
  int sign = 0;             // split sign for coefficient candidates
};

}  // namespace

SolveResult dantzig_solve(const DantzigProblem& problem, const SolverOptions& options) {
  problem.validate();
  const Eigen::MatrixXd& G = problem.gram.matrix();
  const Eigen::VectorXd& beta = problem.beta_hat;
  const Eigen::VectorXd& eta = problem.eta;
  const Eigen::Index M = G.rows();

  const double primal_tol = std::min(1e-10, 0.1 * options.feasibility_tol);
  constexpr double kPivotTol = 1e-9;
  constexpr double kDualTol = 1e-12;

  std::vector<Eigen::Index> S;  // basic coefficients
  std::vector<int> sign_s;      // +1 when lambda+ is basic, -1 for lambda-
  std::vector<Eigen::Index> T;  // residual rows held at a bound
  std::vector<int> bound_t;     // +1 upper (r = eta), -1 lower (r = -eta)
  std::vector<Eigen::Index> slot_s(static_cast<std::size_t>(M), -1);
  std::vector<char> in_t(static_cast<std::size_t>(M), 0);

  Eigen::VectorXd lambda_s;
  Eigen::VectorXd y_t;
  Eigen::VectorXd r(M);
  Eigen::VectorXd gy(M);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  bool bland = options.bland_only;
  std::size_t stalled = 0;
  SolveResult result;
  SolverStatus status = SolverStatus::MaxIter;
  std::size_t iter = 0;

  auto refresh = [&] {
    const auto k = static_cast<Eigen::Index>(S.size());
    r = -beta;
    gy.setZero();
    if (k == 0) {
      lambda_s.resize(0);
      y_t.resize(0);
      return;
    }
    Eigen::MatrixXd basis(k, k);
    Eigen::VectorXd rhs(k);
    Eigen::VectorXd sig(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto t = T[static_cast<std::size_t>(a)];
      rhs[a] = beta[t] + bound_t[static_cast<std::size_t>(a)] * eta[t];
      sig[a] = sign_s[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < k; ++b) basis(a, b) = G(t, S[static_cast<std::size_t>(b)]);
    }
    lu.compute(basis);
    lambda_s = lu.solve(rhs);
    y_t = lu.transpose().solve(sig);
    for (Eigen::Index b = 0; b < k; ++b) r.noalias() += G.col(S[static_cast<std::size_t>(b)]) * lambda_s[b];
    for (Eigen::Index a = 0; a < k; ++a) gy.noalias() += G.col(T[static_cast<std::size_t>(a)]) * y_t[a];
  };

  for (; iter < options.max_iterations; ++iter) {
    refresh();
    const auto k = static_cast<Eigen::Index>(S.size());

    // Pricing: pick a primal infeasible basic variable.
    Eigen::Index leave_row = -1;   // residual row i leaving
    Eigen::Index leave_slot = -1;  // position in S of a coefficient leaving
    double worst = 0.0;
    Eigen::Index best_id = std::numeric_limits<Eigen::Index>::max();
    for (Eigen::Index i = 0; i < M; ++i) {
      if (in_t[static_cast<std::size_t>(i)]) continue;
      const double viol = std::abs(r[i]) - eta[i];
      if (viol <= primal_tol) continue;
      const Eigen::Index id = 2 * M + i;
      if (bland ? id < best_id : viol > worst) {
        worst = viol;
        best_id = id;
        leave_row = i;
        leave_slot = -1;
      }
    }
    for (Eigen::Index b = 0; b < k; ++b) {
      const double v = sign_s[static_cast<std::size_t>(b)] * lambda_s[b];
      if (v >= -primal_tol) continue;
      const auto q = S[static_cast<std::size_t>(b)];
      const Eigen::Index id = 2 * q + (sign_s[static_cast<std::size_t>(b)] > 0 ? 0 : 1);
      if (bland ? id < best_id : -v > worst) {
        worst = -v;
        best_id = id;
        leave_row = -1;
        leave_slot = b;
      }
    }
    if (leave_row < 0 && leave_slot < 0) {
      status = SolverStatus::Optimal;
      break;
    }

    // Row of the tableau for the leaving variable: rho = B^{-T} e_p.
    Eigen::VectorXd rho_t(k);
    int direction;  // +1 when the leaving variable drops to its lower bound
    if (leave_row >= 0) {
      if (k > 0) {
        Eigen::VectorXd rhs(k);
        for (Eigen::Index b = 0; b < k; ++b) rhs[b] = G(leave_row, S[static_cast<std::size_t>(b)]);
        rho_t = lu.transpose().solve(rhs);
      }
      direction = r[leave_row] > eta[leave_row] ? -1 : +1;
    } else {
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(k);
      unit[leave_slot] = sign_s[static_cast<std::size_t>(leave_slot)];
      rho_t = lu.transpose().solve(unit);
      direction = +1;
    }
    Eigen::VectorXd grho = Eigen::VectorXd::Zero(M);
    for (Eigen::Index a = 0; a < k; ++a) grho.noalias() += G.col(T[static_cast<std::size_t>(a)]) * rho_t[a];
    if (leave_row >= 0) grho -= G.col(leave_row);

    // Ratio test over nonbasic variables, keeping reduced costs sign-feasible.
    std::vector<Candidate> cands;
    for (Eigen::Index q = 0; q < M; ++q) {
      const auto slot = slot_s[static_cast<std::size_t>(q)];
      // Only the leaving coefficient may re-enter with the opposite sign.
      if (slot >= 0 && slot != leave_slot) continue;
      for (int sigma : {+1, -1}) {
        if (slot >= 0 && sign_s[static_cast<std::size_t>(slot)] == sigma) continue;
        const double alpha = sigma * grho[q];
        const double sa = direction * alpha;
        if (sa >= -kPivotTol) continue;
        const double d = std::max(0.0, 1.0 - sigma * gy[q]);
        cands.push_back({2 * q + (sigma > 0 ? 0 : 1), d / -sa, alpha, false, q, sigma});
      }
    }
    for (Eigen::Index a = 0; a < k; ++a) {
      const double alpha = -rho_t[a];
      const double sa = direction * alpha;
      const double d = y_t[a];
      const auto t = T[static_cast<std::size_t>(a)];
      if (bound_t[static_cast<std::size_t>(a)] < 0) {
        if (sa >= -kPivotTol) continue;
        cands.push_back({2 * M + t, std::max(0.0, d) / -sa, alpha, true, a, 0});
      } else {
        if (sa <= kPivotTol) continue;
        cands.push_back({2 * M + t, std::max(0.0, -d) / sa, alpha, true, a, 0});
      }
    }
    if (cands.empty()) {
      status = SolverStatus::Infeasible;
      break;
    }

    const Candidate* enter = nullptr;
    if (bland) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : cands) best = std::min(best, c.ratio);
      for (const auto& c : cands)
        if (c.ratio <= best + 1e-12 * (1.0 + best) && (!enter || c.id < enter->id)) enter = &c;
    } else {
      // Harris two-pass test: bound the step with a small dual tolerance, then
      // take the largest pivot among the candidates within that bound.
      double bound = std::numeric_limits<double>::infinity();
      for (const auto& c : cands) bound = std::min(bound, c.ratio + kDualTol / std::abs(c.alpha));
      for (const auto& c : cands)
        if (c.ratio <= bound && (!enter || std::abs(c.alpha) > std::abs(enter->alpha))) enter = &c;
    }

    if (enter->ratio <= 1e-14)
      ++stalled;
    else
      stalled = 0;
    if (stalled >= options.degenerate_pivots_before_bland) bland = true;

    // Basis update.
    const Candidate chosen = *enter;
    if (leave_row >= 0) {
      T.push_back(leave_row);
      bound_t.push_back(r[leave_row] > 0.0 ? +1 : -1);
      in_t[static_cast<std::size_t>(leave_row)] = 1;
    } else {
      const auto q = S[static_cast<std::size_t>(leave_slot)];
      slot_s[static_cast<std::size_t>(q)] = -1;
      S.erase(S.begin() + leave_slot);
      sign_s.erase(sign_s.begin() + leave_slot);
      for (std::size_t b = static_cast<std::size_t>(leave_slot); b < S.size(); ++b)
        slot_s[static_cast<std::size_t>(S[b])] = static_cast<Eigen::Index>(b);
    }
    if (chosen.residual) {
      const auto t = T[static_cast<std::size_t>(chosen.index)];
      in_t[static_cast<std::size_t>(t)] = 0;
      T.erase(T.begin() + chosen.index);
      bound_t.erase(bound_t.begin() + chosen.index);
    } else {
      const auto q = chosen.index;
      if (const auto slot = slot_s[static_cast<std::size_t>(q)]; slot >= 0) {
        // the opposite split of a basic coefficient cannot enter without the
        // basic one leaving first
        throw std::logic_error("dantzig_solve: dependent column selected");
      }
      slot_s[static_cast<std::size_t>(q)] = static_cast<Eigen::Index>(S.size());
      S.push_back(q);
      sign_s.push_back(chosen.sign);
    }
  }

  if (status != SolverStatus::Optimal) refresh();

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(M);
  for (std::size_t b = 0; b < S.size(); ++b) lambda[S[b]] = lambda_s[static_cast<Eigen::Index>(b)];
  Eigen::VectorXd dual = Eigen::VectorXd::Zero(M);
  for (std::size_t a = 0; a < T.size(); ++a) dual[T[a]] = y_t[static_cast<Eigen::Index>(a)];

  result.coefficients = CoefficientVector::from_values(lambda, Method::Dantzig, options.support_tol);
  auto& rep = result.report;
  rep.iterations = iter;
  rep.status = status;
  rep.objective = result.coefficients.l1_norm;
  rep.max_constraint_violation = dantzig_violation(problem, result.coefficients.values);
  const double dual_objective = beta.dot(dual) - eta.dot(dual.cwiseAbs());
  rep.duality_gap_or_kkt_residual = rep.objective - dual_objective;
  if (status == SolverStatus::Optimal && rep.max_constraint_violation > options.feasibility_tol)
    rep.status = SolverStatus::MaxIter;
  result.dual = std::move(dual);
  return result;
}

}  // namespace sparsedens
