#include <biflip/models.hpp>

#include <cmath>
#include <stdexcept>

namespace biflip {

namespace {

void validate(model_id id, const model_params& params) {
  switch (id) {
    case model_id::normal_form:
      if (params.a == 0.0 || params.b == 0.0)
        throw std::invalid_argument("model_params: normal-form requires a != 0 and b != 0");
      break;
    case model_id::oscillator12:
    case model_id::oscillator12_cubic:
      if (!(params.epsilon > 0.0))
        throw std::invalid_argument("model_params: oscillator models require epsilon > 0");
      break;
    case model_id::hirzebruch:
      break;
  }
  if (params.branch_sign != 1 && params.branch_sign != -1)
    throw std::invalid_argument("model_params: branch_sign must be +1 or -1");
}

[[noreturn]] void radicand_error(const char* what) {
  throw std::domain_error(std::string("evaluate_reduced: radicand ") + what + " nonpositive");
}

/// Verify odd-degree coefficients are negligible and zero them; the built-in
/// models are all invariant under (q,p) -> (-q,-p).
void enforce_even(jet<double>& h) {
  const double tol = 1e-12 * std::max(1.0, sup_norm(h));
  for (int m = 0; m <= h.degree_cap; ++m)
    for (int n = 0; m + n <= h.degree_cap; ++n)
      if ((m + n) % 2 == 1) {
        if (std::abs(h.coeffs(m, n)) > tol)
          throw std::runtime_error("reduced_jet: unexpected odd-degree coefficient");
        h.coeffs(m, n) = 0.0;
      }
}

}  // namespace

double evaluate_reduced(model_id id, const model_params& params, double q, double p,
                        double j, double t) {
  validate(id, params);
  const double s = double(params.branch_sign);
  switch (id) {
    case model_id::normal_form: {
      const double n1 = nu_value(params.nu1_spec, j, t);
      const double n2 = nu_value(params.nu2_spec, j, t);
      const double q2 = q * q;
      return 0.5 * params.a * p * p + 0.5 * n1 * q2 + 0.25 * n2 * q2 * q2 +
             (params.b / 6.0) * q2 * q2 * q2;
    }
    case model_id::oscillator12:
    case model_id::oscillator12_cubic: {
      const double sigma = q * q + p * p;
      const double rad = 0.5 * sigma - j;
      if (!(rad > 0.0)) radicand_error("(sigma/2 - j)");
      const double r = sigma - j;
      const double coupling = (id == model_id::oscillator12)
                                  ? params.epsilon * r * r
                                  : params.epsilon * r * r * r;
      return (1.0 - t) * r + t * (s * 2.0 * q * p * std::sqrt(rad) + coupling);
    }
    case model_id::hirzebruch: {
      const double rho = q * q + p * p;
      const double u = 3.0 - j - 0.5 * rho;
      const double v = j - 1.0 + 0.5 * rho;
      if (!(u > 0.0)) radicand_error("(3 - j - rho/2)");
      if (!(v > 0.0)) radicand_error("(j - 1 + rho/2)");
      return (1.0 - t) * 0.5 * u + t * s * (q * q - p * p) * std::sqrt(u * v);
    }
  }
  throw std::logic_error("evaluate_reduced: unknown model");
}

jet<double> reduced_jet(model_id id, const model_params& params, double j, double t,
                        int degree_cap) {
  validate(id, params);
  const double s = double(params.branch_sign);
  const int cap = degree_cap;
  const auto q = jet_q<double>(cap);
  const auto p = jet_p<double>(cap);
  jet<double> h(cap);
  switch (id) {
    case model_id::normal_form: {
      const double n1 = nu_value(params.nu1_spec, j, t);
      const double n2 = nu_value(params.nu2_spec, j, t);
      h.at(0, 2) = 0.5 * params.a;
      h.at(2, 0) = 0.5 * n1;
      if (cap >= 4) h.at(4, 0) = 0.25 * n2;
      if (cap >= 6) h.at(6, 0) = params.b / 6.0;
      return h;
    }
    case model_id::oscillator12:
    case model_id::oscillator12_cubic: {
      const auto sigma = jet_mul(q, q) + jet_mul(p, p);
      auto rad = 0.5 * sigma;
      rad.at(0, 0) -= j;
      if (!(rad(0, 0) > 0.0)) radicand_error("(sigma/2 - j)");
      auto r = sigma;
      r.at(0, 0) -= j;
      const auto r2 = jet_mul(r, r);
      const auto coupling =
          (id == model_id::oscillator12) ? r2 : jet_mul(r2, r);
      h = (1.0 - t) * r +
          t * ((s * 2.0) * jet_mul(jet_mul(q, p), jet_sqrt(rad)) + params.epsilon * coupling);
      break;
    }
    case model_id::hirzebruch: {
      const auto rho = jet_mul(q, q) + jet_mul(p, p);
      auto u = -0.5 * rho;
      u.at(0, 0) += 3.0 - j;
      auto v = 0.5 * rho;
      v.at(0, 0) += j - 1.0;
      if (!(u(0, 0) > 0.0)) radicand_error("(3 - j - rho/2)");
      if (!(v(0, 0) > 0.0)) radicand_error("(j - 1 + rho/2)");
      h = ((1.0 - t) * 0.5) * u +
          (t * s) * jet_mul(jet_mul(q, q) - jet_mul(p, p), jet_sqrt(jet_mul(u, v)));
      break;
    }
    default:
      throw std::logic_error("reduced_jet: unknown model");
  }
  enforce_even(h);
  return h;
}

std::pair<double, double> candidate(model_id id, const model_params& params) {
  validate(id, params);
  switch (id) {
    case model_id::normal_form:
      return {0.0, 0.0};
    case model_id::oscillator12: {
      const double e = params.epsilon;
      return {-1.0 / (16.0 * e * e), 8.0 * e / (8.0 * e + 1.0)};
    }
    case model_id::oscillator12_cubic: {
      // Tangency of the sextic coupling with the reduced cone: the candidate
      // solves nu1 = 0 and d(nu1)/dj = 0 simultaneously, giving
      // m = (12 eps)^(-1/3), j0 = -m^2, t0 = 4 / (4 + 3 m).
      const double m = 1.0 / std::cbrt(12.0 * params.epsilon);
      return {-m * m, 4.0 / (4.0 + 3.0 * m)};
    }
    case model_id::hirzebruch:
      return {2.0, 0.2};
  }
  throw std::logic_error("candidate: unknown model");
}

domain_window default_window(model_id id, const model_params& params) {
  validate(id, params);
  switch (id) {
    case model_id::normal_form:
      return {-1.0, 1.0};
    case model_id::oscillator12:
    case model_id::oscillator12_cubic: {
      const double j0 = candidate(id, params).first;
      return {4.0 * j0, -1e-3};
    }
    case model_id::hirzebruch:
      return {1.0 + 1e-3, 3.0 - 1e-3};
  }
  throw std::logic_error("default_window: unknown model");
}

std::string model_name(model_id id) {
  switch (id) {
    case model_id::normal_form: return "normal-form";
    case model_id::oscillator12: return "osc12";
    case model_id::oscillator12_cubic: return "osc12-cubic";
    case model_id::hirzebruch: return "hirzebruch";
  }
  throw std::logic_error("model_name: unknown model");
}

model_id parse_model_name(const std::string& name) {
  if (name == "normal-form") return model_id::normal_form;
  if (name == "osc12") return model_id::oscillator12;
  if (name == "osc12-cubic") return model_id::oscillator12_cubic;
  if (name == "hirzebruch") return model_id::hirzebruch;
  throw std::invalid_argument("unknown model name: " + name +
                              " (expected normal-form|osc12|osc12-cubic|hirzebruch)");
}

}  // namespace biflip
