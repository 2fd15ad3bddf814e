#include <biflip/singularities.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace biflip {

namespace {

constexpr double kDedupRadius = 1e-7;

point_class classify(double lambda_squared, double tol) {
  if (lambda_squared > tol) return point_class::saddle;
  if (lambda_squared < -tol) return point_class::centre;
  return point_class::degenerate;
}

double nf_value_on_axis(double b, double nu1, double nu2, double q) {
  const double q2 = q * q;
  return q2 * (0.5 * nu1 + q2 * (0.25 * nu2 + q2 * (b / 6.0)));
}

void require_nonzero_ab(const char* fn, double a, double b) {
  if (a == 0.0 || b == 0.0) {
    throw std::invalid_argument(std::string(fn) +
                                ": requires nonzero momentum coefficient a and sextic "
                                "coefficient b");
  }
}

}  // namespace

double disc_b(double nu1, double nu2, double b) { return nu2 * nu2 - 4.0 * b * nu1; }

double eigenvalue_nf(branch_id branch, double a, double b, double nu1, double nu2) {
  if (branch == branch_id::q1) return -(a * nu1);
  if (branch == branch_id::numeric) {
    throw std::invalid_argument("eigenvalue_nf: the numeric branch tag has no closed form");
  }
  require_nonzero_ab("eigenvalue_nf", a, b);
  const double disc = disc_b(nu1, nu2, b);
  if (disc < 0.0) {
    throw std::invalid_argument(
        "eigenvalue_nf: branch does not exist (negative discriminant nu2^2 - 4 b nu1)");
  }
  const double s = std::sqrt(disc);
  const double sign = (branch == branch_id::q2_minus) ? -1.0 : +1.0;
  const double radicand = (-nu2 + sign * s) / (2.0 * b);
  if (radicand < 0.0) {
    throw std::invalid_argument(
        "eigenvalue_nf: branch does not exist (negative squared-coordinate radicand)");
  }
  if (branch == branch_id::q2_minus) return (a / b) * (4.0 * b * nu1 - nu2 * (s + nu2));
  return (a / b) * (4.0 * b * nu1 + nu2 * (s - nu2));
}

std::vector<critical_point> critical_points_nf(double a, double b, double nu1, double nu2) {
  require_nonzero_ab("critical_points_nf", a, b);
  const double disc = disc_b(nu1, nu2, b);
  const double tol = 1e-9 * std::max({1.0, std::abs(a * nu1), std::abs(disc)});

  std::vector<critical_point> pts;
  {
    critical_point origin;
    origin.q = 0.0;
    origin.p = 0.0;
    origin.branch = branch_id::q1;
    origin.lambda_squared = -(a * nu1);
    origin.h = 0.0;
    origin.cls = classify(origin.lambda_squared, tol);
    pts.push_back(origin);
  }

  const auto add_q2 = [&](double radicand, branch_id branch, double lambda_squared) {
    if (radicand < 0.0) return;
    const double q = std::sqrt(radicand);
    for (const critical_point& existing : pts) {
      if (std::abs(existing.q - q) <= kDedupRadius) return;  // coincident branches merge
    }
    critical_point pt;
    pt.q = q;
    pt.p = 0.0;
    pt.branch = branch;
    pt.lambda_squared = lambda_squared;
    pt.h = nf_value_on_axis(b, nu1, nu2, q);
    pt.cls = classify(lambda_squared, tol);
    pts.push_back(pt);
  };

  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    add_q2((-nu2 - s) / (2.0 * b), branch_id::q2_minus,
           (a / b) * (4.0 * b * nu1 - nu2 * (s + nu2)));
    add_q2((-nu2 + s) / (2.0 * b), branch_id::q2_plus,
           (a / b) * (4.0 * b * nu1 + nu2 * (s - nu2)));
  } else if (disc == 0.0) {
    // Double root of the quartic radicand: the two outer branches coincide.
    add_q2(-nu2 / (2.0 * b), branch_id::q2_minus, (a / b) * (4.0 * b * nu1 - nu2 * nu2));
  }
  return pts;
}

namespace {

struct reduced_eval {
  model_id id;
  const model_params& params;
  double j;
  double t;

  bool operator()(double q, double p, double& out) const {
    try {
      out = evaluate_reduced(id, params, q, p, j, t);
      return true;
    } catch (const std::domain_error&) {
      return false;
    }
  }
};

/// Central-difference gradient at step h.
bool fd_gradient_at(const reduced_eval& F, double q, double p, double h, double& gq,
                    double& gp) {
  double fqp1, fqm1, fpp1, fpm1;
  if (!F(q + h, p, fqp1) || !F(q - h, p, fqm1) || !F(q, p + h, fpp1) || !F(q, p - h, fpm1)) {
    return false;
  }
  gq = (fqp1 - fqm1) / (2.0 * h);
  gp = (fpp1 - fpm1) / (2.0 * h);
  return true;
}

/// Richardson-refined gradient: (4 g(h/2) - g(h)) / 3 cancels the O(h^2) term,
/// leaving truncation far below the roundoff floor of the evaluations.
bool fd_gradient(const reduced_eval& F, double q, double p, double& gq, double& gp) {
  const double h = 1e-4 * std::max({1.0, std::abs(q), std::abs(p)});
  double aq, ap, bq, bp;
  if (!fd_gradient_at(F, q, p, h, aq, ap) || !fd_gradient_at(F, q, p, 0.5 * h, bq, bp)) {
    return false;
  }
  gq = (4.0 * bq - aq) / 3.0;
  gp = (4.0 * bp - ap) / 3.0;
  return true;
}

bool fd_hessian(const reduced_eval& F, double q, double p, double h, double& hqq,
                double& hpp, double& hqp) {
  double f0, fqp1, fqm1, fpp1, fpm1, fpp, fpm, fmp, fmm;
  if (!F(q, p, f0) || !F(q + h, p, fqp1) || !F(q - h, p, fqm1) || !F(q, p + h, fpp1) ||
      !F(q, p - h, fpm1) || !F(q + h, p + h, fpp) || !F(q + h, p - h, fpm) ||
      !F(q - h, p + h, fmp) || !F(q - h, p - h, fmm)) {
    return false;
  }
  hqq = (fqp1 - 2.0 * f0 + fqm1) / (h * h);
  hpp = (fpp1 - 2.0 * f0 + fpm1) / (h * h);
  hqp = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
  return true;
}

/// Two-level Richardson-refined Hessian, M** = (16 M*(h/2) - M*(h)) / 15 with
/// M* = (4 M(h/2) - M(h)) / 3: cancels both the h^2 and h^4 truncation terms,
/// so it is exact (up to roundoff) for polynomials of degree <= 6.
bool fd_hessian_refined(const reduced_eval& F, double q, double p, double& hqq,
                        double& hpp, double& hqp) {
  const double h = 1e-2 * std::max({1.0, std::abs(q), std::abs(p)});
  double aqq, app, aqp, bqq, bpp, bqp, cqq, cpp, cqp;
  if (!fd_hessian(F, q, p, h, aqq, app, aqp) ||
      !fd_hessian(F, q, p, 0.5 * h, bqq, bpp, bqp) ||
      !fd_hessian(F, q, p, 0.25 * h, cqq, cpp, cqp)) {
    return false;
  }
  const double s1qq = (4.0 * bqq - aqq) / 3.0;
  const double s1pp = (4.0 * bpp - app) / 3.0;
  const double s1qp = (4.0 * bqp - aqp) / 3.0;
  const double s2qq = (4.0 * cqq - bqq) / 3.0;
  const double s2pp = (4.0 * cpp - bpp) / 3.0;
  const double s2qp = (4.0 * cqp - bqp) / 3.0;
  hqq = (16.0 * s2qq - s1qq) / 15.0;
  hpp = (16.0 * s2pp - s1pp) / 15.0;
  hqp = (16.0 * s2qp - s1qp) / 15.0;
  return true;
}

struct newton_state {
  double q = 0.0;
  double p = 0.0;
  double gq = 0.0;
  double gp = 0.0;
  double gnorm = 0.0;
};

bool newton_critical(const reduced_eval& F, double q0, double p0, double box, double& q_out,
                     double& p_out) {
  newton_state x;
  x.q = q0;
  x.p = p0;
  if (!fd_gradient(F, x.q, x.p, x.gq, x.gp)) return false;
  x.gnorm = std::max(std::abs(x.gq), std::abs(x.gp));

  for (int iter = 0; iter < 60; ++iter) {
    const double h2 = 1e-4 * std::max({1.0, std::abs(x.q), std::abs(x.p)});
    double jqq, jpp, jqp;
    if (!fd_hessian(F, x.q, x.p, h2, jqq, jpp, jqp)) return false;
    const double jscale =
        std::max({1.0, std::abs(jqq) + std::abs(jqp), std::abs(jpp) + std::abs(jqp)});

    double f0;
    if (!F(x.q, x.p, f0)) return false;
    // Acceptance floor sits just above the roundoff noise of the
    // finite-difference gradient, so flat (degenerate) directions terminate
    // instead of wandering inside the noise puddle.
    const double tol_g = 1e-10 * std::max({jscale, 1.0, std::abs(f0)});
    if (x.gnorm <= tol_g) {
      q_out = x.q;
      p_out = x.p;
      return true;
    }

    const double det = jqq * jpp - jqp * jqp;
    if (std::abs(det) <= 1e-14 * jscale * jscale) return false;
    double dq = -(jpp * x.gq - jqp * x.gp) / det;
    double dp = -(jqq * x.gp - jqp * x.gq) / det;
    const double dlen = std::hypot(dq, dp);
    if (dlen > 0.5 * box) {  // keep steps inside a sane trust region
      dq *= 0.5 * box / dlen;
      dp *= 0.5 * box / dlen;
    }

    double alpha = 1.0;
    bool stepped = false;
    newton_state trial;
    for (int bt = 0; bt < 30; ++bt) {
      trial.q = x.q + alpha * dq;
      trial.p = x.p + alpha * dp;
      if (fd_gradient(F, trial.q, trial.p, trial.gq, trial.gp)) {
        trial.gnorm = std::max(std::abs(trial.gq), std::abs(trial.gp));
        if (trial.gnorm <= (1.0 - 1e-4 * alpha) * x.gnorm || trial.gnorm <= tol_g) {
          stepped = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!stepped) return false;

    const double step = std::hypot(trial.q - x.q, trial.p - x.p);
    x = trial;
    if (step <= 1e-14 * std::max(1.0, std::hypot(x.q, x.p)) && x.gnorm > tol_g) {
      return false;  // stagnated above the acceptance floor
    }
  }
  return false;
}

/// One full (undamped) Newton correction; applied only if it shrinks the
/// gradient, to polish accepted roots toward machine accuracy.
void polish_root(const reduced_eval& F, double& q, double& p) {
  for (int pass = 0; pass < 2; ++pass) {
    double gq, gp;
    if (!fd_gradient(F, q, p, gq, gp)) return;
    const double g0 = std::max(std::abs(gq), std::abs(gp));
    if (g0 == 0.0) return;
    const double h2 = 1e-4 * std::max({1.0, std::abs(q), std::abs(p)});
    double jqq, jpp, jqp;
    if (!fd_hessian(F, q, p, h2, jqq, jpp, jqp)) return;
    const double det = jqq * jpp - jqp * jqp;
    const double jscale =
        std::max({1.0, std::abs(jqq) + std::abs(jqp), std::abs(jpp) + std::abs(jqp)});
    if (std::abs(det) <= 1e-12 * jscale * jscale) return;
    const double qn = q - (jpp * gq - jqp * gp) / det;
    const double pn = p - (jqq * gp - jqp * gq) / det;
    double g1q, g1p;
    if (!fd_gradient(F, qn, pn, g1q, g1p)) return;
    if (std::max(std::abs(g1q), std::abs(g1p)) >= g0) return;
    q = qn;
    p = pn;
  }
}

}  // namespace

numeric_scan_result numeric_critical_points(model_id id, const model_params& params,
                                            double j, double t) {
  const reduced_eval F{id, params, j, t};

  // Seed box: generous multiple of the closed-form outer branch when the
  // normal-form coefficients are at hand, otherwise a fixed window.
  double box = 2.0;
  if (id == model_id::normal_form) {
    const double nu1 = nu_value(params.nu1_spec, j, t);
    const double nu2 = nu_value(params.nu2_spec, j, t);
    double max_q = 0.0;
    for (const critical_point& pt : critical_points_nf(params.a, params.b, nu1, nu2)) {
      max_q = std::max(max_q, std::abs(pt.q));
    }
    box = 1.5 * std::max(1.0, max_q);
  }

  constexpr int kGrid = 41;
  constexpr int kHalf = (kGrid - 1) / 2;
  std::vector<std::array<double, 2>> roots;
  for (int iq = 0; iq < kGrid; ++iq) {
    for (int ip = 0; ip < kGrid; ++ip) {
      // (iq - kHalf)/kHalf makes the central seed land on the origin exactly;
      // for the symmetric models the finite-difference gradient vanishes there
      // identically, so the origin is recovered without Newton drift.
      const double q0 = box * ((iq - kHalf) / static_cast<double>(kHalf));
      const double p0 = box * ((ip - kHalf) / static_cast<double>(kHalf));
      double probe;
      if (!F(q0, p0, probe)) continue;  // seed outside the model's domain

      double q, p;
      if (!newton_critical(F, q0, p0, box, q, p)) continue;
      polish_root(F, q, p);

      // Canonical representative of the (q,p) -> (-q,-p) symmetric pair.
      if (q < -1e-12) {
        q = -q;
        p = -p;
      } else if (std::abs(q) <= 1e-12) {
        q = std::abs(q);
        if (p < 0.0) p = -p;
      }

      bool duplicate = false;
      for (const auto& r : roots) {
        if (std::hypot(r[0] - q, r[1] - p) <= kDedupRadius) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) roots.push_back({q, p});
    }
  }

  numeric_scan_result result;
  if (roots.empty()) {
    result.newton_failed_everywhere = true;
    return result;
  }

  std::sort(roots.begin(), roots.end(), [](const auto& u, const auto& v) {
    if (u[0] != v[0]) return u[0] < v[0];
    return u[1] < v[1];
  });

  for (std::size_t i = 0; i < roots.size(); ++i) {
    critical_point pt;
    pt.q = roots[i][0];
    pt.p = roots[i][1];
    pt.branch = branch_id::numeric;

    double hqq, hpp, hqp;
    if (!fd_hessian_refined(F, pt.q, pt.p, hqq, hpp, hqp)) {
      // Point hugs the domain boundary; fall back to a coarse interior step.
      if (!fd_hessian(F, pt.q, pt.p, 1e-5, hqq, hpp, hqp)) continue;
    }
    pt.lambda_squared = hqp * hqp - hqq * hpp;

    double value;
    if (!F(pt.q, pt.p, value)) continue;
    pt.h = value;

    const double tol = 1e-9 * std::max({1.0, std::abs(hqq * hpp), hqp * hqp});
    pt.cls = classify(pt.lambda_squared, tol);
    pt.numeric_index = static_cast<int>(result.points.size());
    result.points.push_back(pt);
  }
  if (result.points.empty()) result.newton_failed_everywhere = true;
  return result;
}

std::string branch_name(const critical_point& pt) {
  switch (pt.branch) {
    case branch_id::q1: return "Q1";
    case branch_id::q2_minus: return "Q2Minus";
    case branch_id::q2_plus: return "Q2Plus";
    case branch_id::numeric: return "Numeric(" + std::to_string(pt.numeric_index) + ")";
  }
  return "?";
}

std::string class_name(point_class c) {
  switch (c) {
    case point_class::centre: return "Centre";
    case point_class::saddle: return "Saddle";
    case point_class::degenerate: return "Degenerate";
  }
  return "?";
}

}  // namespace biflip
