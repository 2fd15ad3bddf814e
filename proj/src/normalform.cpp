#include <biflip/normalform.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace biflip {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct monomial {
  int m, n;
};

constexpr monomial kBasis4[] = {{4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4}};
constexpr monomial kTargets4[] = {{3, 1}, {2, 2}, {1, 3}, {0, 4}};
constexpr monomial kBasis6[] = {{6, 0}, {5, 1}, {4, 2}, {3, 3}, {2, 4}, {1, 5}, {0, 6}};
constexpr monomial kTargets6[] = {{5, 1}, {4, 2}, {3, 3}, {2, 4}, {1, 5}, {0, 6}};

/// Solve the homological system at one degree: find a generator F supported on
/// `basis` such that the bracket with the diagonal quadratic cancels every
/// `target` coefficient of h.  The bracket acts on monomials as
/// {q^m p^n, H2} = a m q^(m-1) p^(n+1) - nu1 n q^(m+1) p^(n-1), so the system
/// is linear with one expected kernel direction (the pure q-power).
template <int NB, int NT>
jet<double> solve_stage(const jet<double>& h, double a, double nu1,
                        const monomial (&basis)[NB], const monomial (&targets)[NT],
                        int degree) {
  Eigen::Matrix<double, NT, NB> mat = Eigen::Matrix<double, NT, NB>::Zero();
  auto target_row = [&](int m, int n) -> int {
    for (int r = 0; r < NT; ++r)
      if (targets[r].m == m && targets[r].n == n) return r;
    return -1;
  };
  for (int c = 0; c < NB; ++c) {
    const int m = basis[c].m, n = basis[c].n;
    if (m > 0) {
      const int r = target_row(m - 1, n + 1);
      if (r >= 0) mat(r, c) += a * double(m);
    }
    if (n > 0) {
      const int r = target_row(m + 1, n - 1);
      if (r >= 0) mat(r, c) -= nu1 * double(n);
    }
  }
  Eigen::Matrix<double, NT, 1> rhs;
  for (int r = 0; r < NT; ++r) rhs(r) = -h(targets[r].m, targets[r].n);
  Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, NT, NB>> cod(mat);
  cod.setThreshold(1e-12);
  if (cod.rank() < NT) {
    std::ostringstream msg;
    msg << "normalize: homological system rank-deficient at degree " << degree
        << " (quadratic p^2 coefficient too close to zero)";
    throw normalization_error(msg.str(), rhs.template lpNorm<Eigen::Infinity>());
  }
  const Eigen::Matrix<double, NB, 1> f = cod.solve(rhs);
  jet<double> gen(h.degree_cap);
  for (int c = 0; c < NB; ++c) gen.at(basis[c].m, basis[c].n) = f(c);
  return gen;
}

bool is_normal_slot(int m, int n) {
  return (m == 2 && n == 0) || (m == 0 && n == 2) || (m == 4 && n == 0) ||
         (m == 6 && n == 0);
}

}  // namespace

quadratic_diagonalization diagonalize_quadratic(const jet<double>& h) {
  const double alpha = h(2, 0);  // q^2 coefficient
  const double beta = h(0, 2);   // p^2 coefficient
  const double gamma = h(1, 1);  // qp coefficient
  const double scale = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma)});
  if (scale == 0.0)
    throw std::domain_error("diagonalize_quadratic: quadratic part is identically zero");

  quadratic_diagonalization out;
  if (std::abs(gamma) <= 1e-12 * scale) {
    out.a = 2.0 * beta;
    out.nu1 = 2.0 * alpha;
    return out;  // already diagonal: identity map, labels untouched
  }

  // The rotated qp coefficient is (beta-alpha) sin 2theta + gamma cos 2theta;
  // of its two zeros pick the axis labeling with |a| >= |nu1|.
  const double theta0 = 0.5 * std::atan2(-gamma, beta - alpha);
  bool have = false;
  for (const double theta : {theta0, theta0 + 0.5 * kPi}) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double cs = c * s;
    const double nu1 = 2.0 * (alpha * c * c + beta * s * s + gamma * cs);
    const double a = 2.0 * (alpha * s * s + beta * c * c - gamma * cs);
    if (!have || std::abs(a) > std::abs(out.a)) {
      out.a = a;
      out.nu1 = nu1;
      out.m.entries << c, -s, s, c;
      have = true;
    }
  }
  if (std::abs(out.a) < std::abs(out.nu1)) {
    // Defensive: the two candidate angles swap the labels, so one of them
    // always satisfies |a| >= |nu1|.
    throw std::logic_error("diagonalize_quadratic: label selection failed");
  }
  return out;
}

normalize_result normalize(const jet<double>& h_in) {
  if (h_in.degree_cap < 6)
    throw std::invalid_argument("normalize: degree_cap must be at least 6");

  jet<double> h(6);
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; m + n <= 6; ++n) h.coeffs(m, n) = h_in(m, n);

  for (int m = 0; m <= 6; ++m)
    for (int n = 0; m + n <= 6; ++n)
      if ((m + n) % 2 == 1 && std::abs(h.coeffs(m, n)) >= 1e-10)
        throw std::invalid_argument("normalize: input jet is not even in (q,p)");

  const auto qd = diagonalize_quadratic(h);
  const jet<double> rotated = substitute_linear(h, qd.m);
  const jet<double> f2 = solve_stage(rotated, qd.a, qd.nu1, kBasis4, kTargets4, 4);
  const jet<double> after4 = lie_transform(rotated, f2);
  const jet<double> f3 = solve_stage(after4, qd.a, qd.nu1, kBasis6, kTargets6, 6);
  const jet<double> final_jet = lie_transform(after4, f3);

  normalize_result out;
  out.f2 = f2;
  out.f3 = f3;
  out.m = qd.m;
  out.normal_jet = final_jet;
  out.nf.a = qd.a;
  out.nf.nu1 = qd.nu1;
  out.nf.nu2 = 4.0 * final_jet(4, 0);
  out.nf.u3_coeff = 8.0 * final_jet(6, 0);
  out.nf.b_q6 = 0.75 * out.nf.u3_coeff;

  double residual = 0.0;
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; m + n <= 6; ++n)
      if (m + n >= 1 && !is_normal_slot(m, n))
        residual = std::max(residual, std::abs(final_jet(m, n)));
  out.nf.residual = residual;
  if (residual > 1e-9)
    throw normalization_error("normalize: residual above tolerance", residual);
  return out;
}

nu_derivatives estimate_nu_derivatives(model_id id, const model_params& params, double j,
                                       double t, double fd_step, bool richardson) {
  if (!(fd_step > 0.0))
    throw std::invalid_argument("estimate_nu_derivatives: fd_step must be positive");
  const double h = fd_step * std::max(1.0, std::abs(j));
  const double k = fd_step * std::max(1.0, std::abs(t));

  auto coeffs_at = [&](double jj, double tt) -> nf_coefficients {
    try {
      return normalize(reduced_jet(id, params, jj, tt, 6)).nf;
    } catch (const normalization_error& e) {
      std::ostringstream msg;
      msg << "estimate_nu_derivatives: normalization failed at stencil point (j,t) = ("
          << jj << ", " << tt << "): " << e.what();
      throw normalization_error(msg.str(), e.residual);
    }
  };

  const nf_coefficients c0 = coeffs_at(j, t);
  const nf_coefficients cp = coeffs_at(j + h, t);
  const nf_coefficients cm = coeffs_at(j - h, t);
  const nf_coefficients cp2 = coeffs_at(j + 2.0 * h, t);
  const nf_coefficients cm2 = coeffs_at(j - 2.0 * h, t);
  const nf_coefficients tp = coeffs_at(j, t + k);
  const nf_coefficients tm = coeffs_at(j, t - k);

  nu_derivatives d;
  d.step_j = h;
  d.step_t = k;
  d.d_nu1_dj = (cp.nu1 - cm.nu1) / (2.0 * h);
  d.d2_nu1_dj2 = (cp.nu1 - 2.0 * c0.nu1 + cm.nu1) / (h * h);
  d.d_nu1_dt = (tp.nu1 - tm.nu1) / (2.0 * k);
  d.d_nu2_dj = (cp.nu2 - cm.nu2) / (2.0 * h);
  if (richardson) {
    const double d1_wide = (cp2.nu1 - cm2.nu1) / (4.0 * h);
    const double d2_wide = (cp2.nu1 - 2.0 * c0.nu1 + cm2.nu1) / (4.0 * h * h);
    const double n2_wide = (cp2.nu2 - cm2.nu2) / (4.0 * h);
    d.d_nu1_dj = (4.0 * d.d_nu1_dj - d1_wide) / 3.0;
    d.d2_nu1_dj2 = (4.0 * d.d2_nu1_dj2 - d2_wide) / 3.0;
    d.d_nu2_dj = (4.0 * d.d_nu2_dj - n2_wide) / 3.0;
  }
  return d;
}

saddle_node_report check_saddle_node(const nu_derivatives& d, double nu1_at_base) {
  constexpr double tol = 1e-6;
  saddle_node_report r;
  r.nu1 = nu1_at_base;
  r.d_nu1_dj = d.d_nu1_dj;
  r.d2_nu1_dj2 = d.d2_nu1_dj2;
  r.d_nu1_dt = d.d_nu1_dt;
  r.nu1_vanishes = std::abs(nu1_at_base) <= tol;
  r.slope_vanishes = std::abs(d.d_nu1_dj) <= tol;
  r.curvature_nonzero = std::abs(d.d2_nu1_dj2) >= tol;
  r.t_slope_nonzero = std::abs(d.d_nu1_dt) >= tol;
  r.passes = r.nu1_vanishes && r.slope_vanishes && r.curvature_nonzero && r.t_slope_nonzero;
  return r;
}

concavity_report_t concavity_report(const nu_derivatives& d, double b,
                                    const std::string& b_convention) {
  if (d.d2_nu1_dj2 == 0.0)
    throw std::invalid_argument("concavity_report: d2_nu1_dj2 must be nonzero");
  if (b == 0.0) throw std::invalid_argument("concavity_report: b must be nonzero");
  constexpr double tol = 1e-6;
  concavity_report_t r;
  r.b_convention = b_convention;
  r.ratio = (1.0 / (2.0 * b)) * (d.d_nu2_dj * d.d_nu2_dj) / d.d2_nu1_dj2;
  if (std::abs(r.ratio - 1.0) <= tol)
    r.verdict = concavity_verdict::degenerate;
  else if (r.ratio < 1.0)
    r.verdict = concavity_verdict::same_direction;
  else
    r.verdict = concavity_verdict::opposite_direction;
  return r;
}

std::string verdict_name(concavity_verdict v) {
  switch (v) {
    case concavity_verdict::same_direction: return "SameDirection";
    case concavity_verdict::opposite_direction: return "OppositeDirection";
    case concavity_verdict::degenerate: return "Degenerate";
  }
  return "?";
}

}  // namespace biflip
