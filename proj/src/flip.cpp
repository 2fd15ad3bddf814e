#include <biflip/flip.hpp>

#include <biflip/normalform.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biflip {

namespace {

constexpr double kKindTol = 1e-8;    // band on a*nu2 around the sign boundary
constexpr double kRootTol = 1e-10;   // bisection / touch acceptance on |nu1|
constexpr int kScanSamples = 200;

struct nf_point {
  double a;
  double nu1;
  double nu2;
};

nf_point eval_nf(model_id id, const model_params& params, double j, double t) {
  const auto res = normalize(reduced_jet(id, params, j, t));
  return {res.nf.a, res.nf.nu1, res.nf.nu2};
}

}  // namespace

flip_kind flip_type(double a, double nu2) {
  const double crit = a * nu2;
  if (crit < -kKindTol) return flip_kind::dual_flip;
  if (crit > kKindTol) return flip_kind::flip;
  return flip_kind::undetermined;
}

cone_tangency_t cone_tangency(double a, double nu1, double nu2) {
  if (a == 0.0) {
    throw std::invalid_argument("cone_tangency: momentum coefficient a must be nonzero");
  }
  return {-nu1 / a, -2.0 * nu2 / a};
}

std::vector<flip_event> solve_flip_locus(model_id id, const model_params& params, double t,
                                         const domain_window& window) {
  const double width = window.j_max - window.j_min;
  if (!(width > 0.0)) {
    throw std::invalid_argument("solve_flip_locus: window must satisfy j_min < j_max");
  }

  const auto nu1_at = [&](double j) { return eval_nf(id, params, j, t).nu1; };

  std::vector<double> x(kScanSamples), f(kScanSamples);
  for (int i = 0; i < kScanSamples; ++i) {
    x[i] = window.j_min + width * i / (kScanSamples - 1);
    f[i] = nu1_at(x[i]);
  }

  std::vector<double> roots;
  const auto push_root = [&](double j) {
    for (const double r : roots) {
      if (std::abs(r - j) <= 1e-9 * std::max(1.0, std::abs(j))) return;
    }
    roots.push_back(j);
  };

  // Sign-change intervals -> bisection to |nu1| <= 1e-10.
  for (int i = 0; i + 1 < kScanSamples; ++i) {
    if (f[i] == 0.0) {
      push_root(x[i]);
      continue;
    }
    if (!(f[i] * f[i + 1] < 0.0)) continue;
    double lo = x[i], hi = x[i + 1];
    double flo = f[i];
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double fm = nu1_at(mid);
      if (std::abs(fm) <= kRootTol || hi - lo <= 4.0 * std::abs(mid) * 1e-16) break;
      if ((flo < 0.0) == (fm < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    push_root(mid);
  }
  if (f[kScanSamples - 1] == 0.0) push_root(x[kScanSamples - 1]);

  // Sign-touch: a local |nu1| minimum dipping to <= 1e-10 without a crossing
  // (the tangency slice through the double root).  Golden-section refinement.
  constexpr double kGolden = 0.6180339887498949;
  for (int i = 1; i + 1 < kScanSamples; ++i) {
    if (f[i] == 0.0) continue;
    if (std::abs(f[i]) > std::abs(f[i - 1]) || std::abs(f[i]) > std::abs(f[i + 1])) continue;
    if (f[i - 1] * f[i] < 0.0 || f[i] * f[i + 1] < 0.0) continue;  // handled as crossings
    double lo = x[i - 1], hi = x[i + 1];
    double m1 = hi - kGolden * (hi - lo);
    double m2 = lo + kGolden * (hi - lo);
    double g1 = std::abs(nu1_at(m1));
    double g2 = std::abs(nu1_at(m2));
    for (int it = 0; it < 90 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      if (g1 <= g2) {
        hi = m2;
        m2 = m1;
        g2 = g1;
        m1 = hi - kGolden * (hi - lo);
        g1 = std::abs(nu1_at(m1));
      } else {
        lo = m1;
        m1 = m2;
        g1 = g2;
        m2 = lo + kGolden * (hi - lo);
        g2 = std::abs(nu1_at(m2));
      }
    }
    const double jm = 0.5 * (lo + hi);
    if (std::abs(nu1_at(jm)) <= kRootTol) push_root(jm);
  }

  std::sort(roots.begin(), roots.end());

  std::vector<flip_event> events;
  events.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const nf_point at = eval_nf(id, params, roots[i], t);
    flip_event ev;
    ev.j0 = roots[i];
    ev.t = t;
    ev.side = (i == 0) ? locus_side::minus : locus_side::plus;
    ev.nu2_at = at.nu2;
    ev.kind = flip_type(at.a, at.nu2);
    events.push_back(ev);
  }
  return events;
}

std::string flip_kind_name(flip_kind kind) {
  switch (kind) {
    case flip_kind::flip: return "Flip";
    case flip_kind::dual_flip: return "DualFlip";
    case flip_kind::undetermined: return "Undetermined";
  }
  return "?";
}

std::string side_name(locus_side side) {
  switch (side) {
    case locus_side::minus: return "Minus";
    case locus_side::plus: return "Plus";
  }
  return "?";
}

}  // namespace biflip
