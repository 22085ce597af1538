#include "pinn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/Core>

#include "pinn/errors.hpp"

namespace pinn {

namespace {

using Vec = Eigen::VectorXd;

struct Evaluator {
  const Objective& f;
  int count = 0;

  double operator()(const Vec& x, Vec& g) {
    g.resize(x.size());
    ++count;
    return f(std::span<const double>(x.data(), x.size()), std::span<double>(g.data(), g.size()));
  }
};

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

OptimResult adam_run(const Objective& f, std::span<const double> x0, const AdamOptions& opt) {
  Evaluator eval{f};
  Vec x = Eigen::Map<const Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  Vec g, m = Vec::Zero(x.size()), v = Vec::Zero(x.size());
  OptimResult res;
  double b1t = 1.0, b2t = 1.0;
  double last_finite = 0.0;
  for (int step = 0; step < opt.steps; ++step) {
    const double fx = eval(x, g);
    if (!std::isfinite(fx) || !g.allFinite()) {
      std::ostringstream os;
      os << "adam: non-finite loss or gradient at step " << step;
      if (step > 0) os << " (last finite loss " << last_finite << ")";
      throw DivergenceError(os.str());
    }
    last_finite = fx;
    res.history.push_back(fx);
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseAbs2();
    b1t *= opt.beta1;
    b2t *= opt.beta2;
    const double step_size = opt.learning_rate / (1.0 - b1t);
    const double v_scale = 1.0 / (1.0 - b2t);
    x.array() -= step_size * m.array() / ((v.array() * v_scale).sqrt() + opt.epsilon);
    ++res.iterations;
  }
  res.loss = eval(x, g);
  if (!std::isfinite(res.loss))
    throw DivergenceError("adam: non-finite loss after the final step");
  res.history.push_back(res.loss);
  res.x = to_std(x);
  res.evaluations = eval.count;
  res.message = "step limit reached";
  return res;
}

namespace {

struct Trial {
  double a = 0.0, f = 0.0, dphi = 0.0;
  Vec x, g;
};

/// Minimizer of the cubic matching values and slopes at a and b, or NaN.
double cubic_minimizer(const Trial& p, const Trial& q) {
  const double d1 = p.dphi + q.dphi - 3.0 * (p.f - q.f) / (p.a - q.a);
  const double rad = d1 * d1 - p.dphi * q.dphi;
  if (!(rad >= 0.0)) return std::nan("");
  const double d2 = std::copysign(std::sqrt(rad), q.a - p.a);
  const double denom = q.dphi - p.dphi + 2.0 * d2;
  if (denom == 0.0) return std::nan("");
  return q.a - (q.a - p.a) * (q.dphi + d2 - d1) / denom;
}

class LineSearch {
 public:
  LineSearch(Evaluator& eval, const LbfgsOptions& opt, const Vec& x, double f0, const Vec& d, double dphi0)
      : eval_(eval), opt_(opt), x_(x), f0_(f0), d_(d), dphi0_(dphi0) {}

  /// Returns true with `out` set on success. On failure `out` holds the best
  /// trial with sufficient decrease, if any (out.a > 0).
  bool run(double a_init, Trial& out) {
    Trial prev;
    prev.a = 0.0;
    prev.f = f0_;
    prev.dphi = dphi0_;
    double a = a_init;
    best_.a = 0.0;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Trial cur = probe(a);
      if (!armijo(cur) || (i > 0 && cur.f >= prev.f && !in_noise(cur))) return zoom(prev, cur, out);
      if (std::abs(cur.dphi) <= -opt_.c2 * dphi0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.dphi >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      a *= 2.0;
    }
    out = best_;
    return false;
  }

 private:
  Trial probe(double a) {
    Trial t;
    t.a = a;
    t.x = x_ + a * d_;
    t.f = eval_(t.x, t.g);
    t.dphi = std::isfinite(t.f) ? t.g.dot(d_) : std::nan("");
    if (std::isfinite(t.f) && armijo(t) && (best_.a == 0.0 || t.f < best_.f)) best_ = t;
    return t;
  }

  /// Predicted decrease below rounding noise in f.
  bool in_noise(const Trial& t) const {
    return opt_.c1 * t.a * std::abs(dphi0_) <= 1e-12 * std::abs(f0_);
  }

  /// Armijo, or in the noise regime the approximate Wolfe test of Hager and
  /// Zhang: f within rounding of f0 and phi'(a) <= (2 c1 - 1) phi'(0).
  bool armijo(const Trial& t) const {
    if (!std::isfinite(t.f)) return false;
    if (t.f <= f0_ + opt_.c1 * t.a * dphi0_) return true;
    return in_noise(t) && t.f <= f0_ + 1e-12 * std::abs(f0_) &&
           t.dphi <= (2.0 * opt_.c1 - 1.0) * dphi0_;
  }

  bool zoom(Trial lo, Trial hi, Trial& out) {
    for (int i = 0; i < opt_.max_line_search; ++i) {
      const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a);
      const double width = right - left;
      if (width <= 1e-16 * std::max(1.0, right)) break;
      double a = std::isfinite(hi.f) ? cubic_minimizer(lo, hi) : std::nan("");
      if (!(a >= left + 0.1 * width && a <= right - 0.1 * width)) a = 0.5 * (lo.a + hi.a);
      Trial cur = probe(a);
      if (!armijo(cur) || (cur.f >= lo.f && !in_noise(cur))) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.dphi) <= -opt_.c2 * dphi0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.dphi * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    out = best_;
    return false;
  }

  Evaluator& eval_;
  const LbfgsOptions& opt_;
  const Vec& x_;
  double f0_;
  const Vec& d_;
  double dphi0_;
  Trial best_;
};

}  // namespace

OptimResult lbfgs_run(const Objective& f, std::span<const double> x0, const LbfgsOptions& opt) {
  Evaluator eval{f};
  Vec x = Eigen::Map<const Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  Vec g;
  double fx = eval(x, g);
  if (!std::isfinite(fx) || !g.allFinite())
    throw DivergenceError("lbfgs: non-finite loss or gradient at the starting point");

  OptimResult res;
  res.history.push_back(fx);
  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(static_cast<std::size_t>(std::max(opt.history, 1)));

  auto direction = [&](Vec& d) {
    d = -g;
    const int k = static_cast<int>(s_hist.size());
    for (int i = k - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (k > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (int i = 0; i < k; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
  };

  if (g.norm() <= opt.tolerance) {
    res.converged = true;
    res.message = "gradient tolerance reached";
  }
  Vec d;
  while (!res.converged && res.iterations < opt.max_iters) {
    direction(d);
    double dphi = g.dot(d);
    if (!(dphi < 0.0)) {
      s_hist.clear(), y_hist.clear(), rho_hist.clear();
      d = -g;
      dphi = -g.squaredNorm();
    }
    const double a_init = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    Trial t;
    bool ok = LineSearch(eval, opt, x, fx, d, dphi).run(a_init, t);
    if (!ok && t.a == 0.0 && !s_hist.empty()) {
      // Retry once along steepest descent with fresh memory.
      s_hist.clear(), y_hist.clear(), rho_hist.clear();
      d = -g;
      dphi = -g.squaredNorm();
      ok = LineSearch(eval, opt, x, fx, d, dphi).run(std::min(1.0, 1.0 / g.norm()), t);
    }
    if (!ok && t.a == 0.0) {
      res.line_search_failed = true;
      res.message = "line search found no decrease";
      break;
    }
    // A step with sufficient decrease but no curvature condition is still
    // taken; the pair is kept only if it keeps the inverse Hessian positive.
    Vec s = t.x - x, y = t.g - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
      if (static_cast<int>(s_hist.size()) == opt.history) {
        s_hist.pop_front(), y_hist.pop_front(), rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    const double f_prev = fx;
    x = std::move(t.x);
    g = std::move(t.g);
    fx = t.f;
    res.history.push_back(fx);
    ++res.iterations;
    if (g.norm() <= opt.tolerance) {
      res.converged = true;
      res.message = "gradient tolerance reached";
    } else if (opt.ftol > 0.0 && f_prev - fx <= opt.ftol * std::max(std::abs(fx), 1.0)) {
      res.converged = true;
      res.message = "relative decrease below ftol";
    }
  }
  if (res.message.empty()) res.message = "iteration limit reached";
  res.x = to_std(x);
  res.loss = fx;
  res.evaluations = eval.count;
  return res;
}

}  // namespace pinn
