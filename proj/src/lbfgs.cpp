// SPDX-License-Identifier: Apache-2.0
#include "strainrom/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

struct Probe {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  [[nodiscard]] bool finite() const { return std::isfinite(f) && std::isfinite(dphi); }
};

// Minimiser of the cubic through (a, fa, da) and (b, fb, db), kept inside
// the central 80% of the bracket; bisection if the fit is unusable.
double cubic_step(const Probe& a, const Probe& b) {
  const double lo = std::min(a.alpha, b.alpha), hi = std::max(a.alpha, b.alpha);
  const double margin = 0.1 * (hi - lo);
  double t = 0.5 * (a.alpha + b.alpha);
  if (a.finite() && b.finite()) {
    const double d1 = a.dphi + b.dphi - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.dphi * b.dphi;
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
      const double denom = b.dphi - a.dphi + 2.0 * d2;
      if (denom != 0.0) {
        const double c = b.alpha - (b.alpha - a.alpha) * (b.dphi + d2 - d1) / denom;
        if (std::isfinite(c)) t = c;
      }
    }
  }
  return std::clamp(t, lo + margin, hi - margin);
}

class LineSearch {
 public:
  LineSearch(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& p, double f0, double d0,
             const LbfgsOptions& opt, int& evals)
      : f_(f), x_(x), p_(p), f0_(f0), d0_(d0), opt_(opt), evals_(evals) {}

  bool run(double alpha0, Probe& out) {
    Probe prev;
    prev.alpha = 0.0;
    prev.f = f0_;
    prev.dphi = d0_;
    double alpha = alpha0;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Probe cur = probe(alpha);
      if (!cur.finite() || cur.f > f0_ + opt_.c1 * alpha * d0_ || (i > 0 && cur.f >= prev.f))
        return zoom(prev, cur, out);
      if (std::abs(cur.dphi) <= -opt_.c2 * d0_) {
        out = cur;
        return true;
      }
      if (cur.dphi >= 0.0) return zoom(cur, prev, out);
      prev = cur;
      alpha *= 2.0;
    }
    return false;
  }

 private:
  Probe probe(double alpha) {
    Probe p;
    p.alpha = alpha;
    p.x = x_ + alpha * p_;
    p.g.resize(x_.size());
    p.f = f_(p.x, p.g);
    ++evals_;
    p.dphi = std::isfinite(p.f) ? p.g.dot(p_) : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(p.f) && (!best_ || p.f < best_->f)) best_ = p;
    return p;
  }

  bool zoom(Probe lo, Probe hi, Probe& out) {
    for (int i = 0; i < opt_.max_line_search; ++i) {
      const double alpha = cubic_step(lo, hi);
      if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      Probe cur = probe(alpha);
      if (!cur.finite() || cur.f > f0_ + opt_.c1 * alpha * d0_ || cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.dphi) <= -opt_.c2 * d0_) {
          out = cur;
          return true;
        }
        if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    // Sufficient decrease without curvature is still progress.
    if (lo.alpha > 0.0 && lo.f < f0_) {
      out = lo;
      return true;
    }
    return false;
  }

 public:
  std::optional<Probe> best_;

 private:
  const Objective& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  double f0_, d0_;
  const LbfgsOptions& opt_;
  int& evals_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, const Eigen::VectorXd& x0, const LbfgsOptions& opt) {
  LbfgsResult r;
  r.x = x0;
  Eigen::VectorXd g(x0.size());
  r.f = objective(r.x, g);
  r.evaluations = 1;
  if (!std::isfinite(r.f)) raise(ErrorKind::LineSearchFailure, "objective is not finite at the starting point");
  r.history.push_back(r.f);

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;

  for (;;) {
    r.grad_norm = g.norm();
    if (r.grad_norm < opt.grad_tol * (1.0 + std::abs(r.f))) {
      r.converged = true;
      break;
    }
    if (r.iterations >= opt.max_iter) break;

    Eigen::VectorXd q = g;
    std::vector<double> a(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      a[k] = rho[k] * S[k].dot(q);
      q -= a[k] * Y[k];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * Y[k].dot(q);
      q += (a[k] - beta) * S[k];
    }
    Eigen::VectorXd p = -q;
    double d0 = g.dot(p);
    if (!(d0 < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      p = -g;
      d0 = -g.squaredNorm();
    }

    const double alpha0 = S.empty() ? std::min(1.0, 1.0 / r.grad_norm) : 1.0;
    LineSearch ls(objective, r.x, p, r.f, d0, opt, r.evaluations);
    Probe step;
    if (!ls.run(alpha0, step)) {
      if (ls.best_ && ls.best_->f < r.f) {
        r.x = ls.best_->x;
        r.f = ls.best_->f;
        g = ls.best_->g;
        r.grad_norm = g.norm();
        r.history.push_back(r.f);
      }
      r.line_search_failed = true;
      std::cerr << fmt::format("warning: L-BFGS line search failed at iteration {} (f = {:.6e}, |g| = {:.3e})\n",
                               r.iterations, r.f, r.grad_norm);
      break;
    }

    const Eigen::VectorXd s = step.x - r.x;
    const Eigen::VectorXd y = step.g - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (static_cast<int>(S.size()) == opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
    }
    r.x = step.x;
    r.f = step.f;
    g = step.g;
    ++r.iterations;
    r.history.push_back(r.f);
    if (opt.verbose)
      std::cerr << fmt::format("  lbfgs {:4d}  f = {:.6e}  |g| = {:.3e}\n", r.iterations, r.f, g.norm());
  }
  r.grad_norm = g.norm();
  return r;
}

}  // namespace strainrom
