#include <biflip/selfcheck.hpp>

#include <biflip/diagram.hpp>
#include <biflip/flip.hpp>
#include <biflip/jet.hpp>
#include <biflip/singularities.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace biflip {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

}  // namespace

normalize_outcome run_normalize(model_id id, const model_params& params, double j,
                                double t, double fd_step, int degree_cap) {
  normalize_outcome out;
  const auto res = normalize(reduced_jet(id, params, j, t, degree_cap));
  out.nf = res.nf;
  out.lambda2_origin = -(res.nf.a * res.nf.nu1);
  out.derivs = estimate_nu_derivatives(id, params, j, t, fd_step);
  out.saddle = check_saddle_node(out.derivs, res.nf.nu1);
  bool concavity_defined = true;
  try {
    out.concavity = concavity_report(out.derivs, res.nf.b_q6, "b_q6");
  } catch (const std::invalid_argument&) {
    concavity_defined = false;
    out.concavity.ratio = std::numeric_limits<double>::quiet_NaN();
    out.concavity.verdict = concavity_verdict::degenerate;
    out.concavity.b_convention = "b_q6";
  }
  out.affirmed = out.saddle.passes && concavity_defined &&
                 out.concavity.verdict != concavity_verdict::degenerate;
  out.exit_code = out.affirmed ? 0 : 2;

  std::string& s = out.text;
  s += "model: " + model_name(id) + "\n";
  s += "point: j = " + fmt17(j) + "  t = " + fmt17(t) + "\n";
  s += "a: " + fmt17(res.nf.a) + "\n";
  s += "nu1: " + fmt17(res.nf.nu1) + "\n";
  s += "nu2: " + fmt17(res.nf.nu2) + "\n";
  s += "b (u^3 convention, H = a v + nu1 u + nu2 u^2 + b u^3): " +
       fmt17(res.nf.u3_coeff) + "\n";
  s += "b (q^6/6 convention, H = ... + (b/6) q^6): " + fmt17(res.nf.b_q6) + "\n";
  s += "residual: " + fmt17(res.nf.residual) + "\n";
  s += "axis lambda^2: " + fmt17(out.lambda2_origin) + "\n";
  s += "d(nu1)/dj: " + fmt17(out.derivs.d_nu1_dj) + "\n";
  s += "d2(nu1)/dj2: " + fmt17(out.derivs.d2_nu1_dj2) + "\n";
  s += "d(nu1)/dt: " + fmt17(out.derivs.d_nu1_dt) + "\n";
  s += "d(nu2)/dj: " + fmt17(out.derivs.d_nu2_dj) + "\n";
  s += "saddle-node: " + std::string(out.saddle.passes ? "pass" : "fail") +
       " [nu1~0: " + yesno(out.saddle.nu1_vanishes) +
       ", d(nu1)/dj~0: " + yesno(out.saddle.slope_vanishes) +
       ", d2(nu1)/dj2!=0: " + yesno(out.saddle.curvature_nonzero) +
       ", d(nu1)/dt!=0: " + yesno(out.saddle.t_slope_nonzero) + "]\n";
  if (concavity_defined) {
    s += "concavity ratio: " + fmt17(out.concavity.ratio) +
         " (convention: " + out.concavity.b_convention + ")\n";
    s += "concavity verdict: " + verdict_name(out.concavity.verdict) + "\n";
  } else {
    s += "concavity ratio: undefined (zero curvature)\n";
    s += "concavity verdict: Degenerate\n";
  }
  s += "double flip: " + std::string(out.affirmed ? "affirmed" : "not affirmed") + "\n";
  return out;
}

namespace {

check_row num_row(const std::string& key, double expected, double actual, double tol,
                  bool relative, bool known = false) {
  check_row r;
  r.key = key;
  r.expected = fmt17(expected);
  r.actual = fmt17(actual);
  const double scale = relative ? std::abs(expected) : 1.0;
  r.pass = std::abs(actual - expected) <= tol * scale;
  r.known_discrepancy = known;
  return r;
}

check_row bound_row(const std::string& key, double bound, double actual,
                    bool known = false) {
  check_row r;
  r.key = key;
  r.expected = "<= " + fmt17(bound);
  r.actual = fmt17(actual);
  r.pass = std::abs(actual) <= bound;
  r.known_discrepancy = known;
  return r;
}

check_row text_row(const std::string& key, const std::string& expected,
                   const std::string& actual, bool known = false) {
  check_row r;
  r.key = key;
  r.expected = expected;
  r.actual = actual;
  r.pass = expected == actual;
  r.known_discrepancy = known;
  return r;
}

// Closed-form flip-locus roots of the two worked examples, as printed by
// their derivations: j0(eps,t) for the oscillator family and j0(t) for the
// ruled-surface family.
double osc_root(double eps, double t, double sign) {
  const double rad = t * (t * (8.0 * eps + 1.0) - 8.0 * eps);
  return (4.0 * eps - t * (4.0 * eps + 1.0) + sign * std::sqrt(rad)) /
         (8.0 * t * eps * eps);
}

double ruled_root(double t, double sign) {
  return (8.0 * t + sign * std::sqrt((5.0 * t - 1.0) * (3.0 * t + 1.0))) / (4.0 * t);
}

jet<double> sample_jet(int which) {
  jet<double> f(6);
  // Deterministic dyadic coefficients on degrees <= 3 (brackets stay exact).
  for (int m = 0; m <= 3; ++m) {
    for (int n = 0; m + n <= 3; ++n) {
      f.at(m, n) = ((which + 1) * (3 * m - 2 * n + 5) % 13 - 6) / 16.0;
    }
  }
  return f;
}

void property_rows(selfcheck_report& rep) {
  // Bracket axioms on exact dyadic jets.
  const jet<double> f = sample_jet(0), g = sample_jet(1), h = sample_jet(2);
  rep.rows.push_back(bound_row(
      "bracket-antisymmetry", 1e-12,
      sup_norm(poisson_bracket(f, g) + poisson_bracket(g, f))));
  rep.rows.push_back(bound_row(
      "bracket-jacobi", 1e-12,
      sup_norm(poisson_bracket(f, poisson_bracket(g, h)) +
               poisson_bracket(g, poisson_bracket(h, f)) +
               poisson_bracket(h, poisson_bracket(f, g)))));
  rep.rows.push_back(bound_row(
      "bracket-leibniz", 1e-12,
      sup_norm(poisson_bracket(f, jet_mul(g, h)) -
               (jet_mul(poisson_bracket(f, g), h) + jet_mul(g, poisson_bracket(f, h))))));

  // Invariant relation of the oscillator reduction:
  // (J+R)^2 (J-R) + 2 (X^2+Y^2) = 0 on the original phase space.
  {
    std::mt19937 rng(1111);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double q1 = dist(rng), p1 = dist(rng), q2 = dist(rng), p2 = dist(rng);
      const double half = 0.5 * (q1 * q1 + p1 * p1);
      const double other = q2 * q2 + p2 * p2;
      const double J = half - other, R = half + other;
      const double X = 2.0 * q1 * p1 * q2 + (q1 * q1 - p1 * p1) * p2;
      const double Y = (q1 * q1 - p1 * p1) * q2 - 2.0 * q1 * p1 * p2;
      const double lhs = (J + R) * (J + R) * (J - R) + 2.0 * (X * X + Y * Y);
      const double scale = std::max({1.0, std::abs((J + R) * (J + R) * (J - R)),
                                     2.0 * (X * X + Y * Y)});
      worst = std::max(worst, std::abs(lhs) / scale);
    }
    rep.rows.push_back(bound_row("invariants-oscillator", 1e-9, worst));
  }

  // Invariant relation of the ruled-surface reduction:
  // X^2 + Y^2 = 16 R (1-R) (3-J-2R)^2 on the chart used by the model.
  {
    std::mt19937 rng(1212);
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x1 = dist(rng), y1 = dist(rng), x4 = dist(rng), y4 = dist(rng);
      const double z4sq = x4 * x4 + y4 * y4;
      const double z1sq = x1 * x1 + y1 * y1;
      const double x3 = std::sqrt(2.0 - z4sq);
      const double J = 0.5 * (2.0 + 2.0 * z4sq - z1sq);
      const double R = 0.5 * x3 * x3;
      const double re = x1 * x1 - y1 * y1, im = -2.0 * x1 * y1;
      const double X = x3 * (re * x4 + im * y4);
      const double Y = x3 * (im * x4 - re * y4);
      const double lhs = X * X + Y * Y;
      const double rhs = 16.0 * R * (1.0 - R) * (3.0 - J - 2.0 * R) * (3.0 - J - 2.0 * R);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    rep.rows.push_back(bound_row("invariants-ruled-surface", 1e-9, worst));
  }

  // Even symmetry of the reduced Hamiltonians: H(q,p) = H(-q,-p).
  {
    model_params osc;
    osc.epsilon = 0.125;
    const struct {
      const char* key;
      model_id id;
      model_params mp;
      double j, t;
    } probes[] = {
        {"even-symmetry-oscillator", model_id::oscillator12, osc, -4.0, 0.5},
        {"even-symmetry-ruled-surface", model_id::hirzebruch, model_params{}, 2.0, 0.2},
    };
    for (const auto& pr : probes) {
      double worst = 0.0;
      for (const double q : {-0.4, -0.15, 0.1, 0.3}) {
        for (const double p : {-0.4, -0.15, 0.1, 0.3}) {
          const double a = evaluate_reduced(pr.id, pr.mp, q, p, pr.j, pr.t);
          const double b = evaluate_reduced(pr.id, pr.mp, -q, -p, pr.j, pr.t);
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
      }
      rep.rows.push_back(bound_row(pr.key, 1e-12, worst));
    }
  }

  // Normalization residual on 9x9 grids around each candidate point.
  {
    model_params osc;
    osc.epsilon = 0.125;
    model_params cub;
    cub.epsilon = 9.0 / 256.0;
    const struct {
      const char* key;
      model_id id;
      model_params mp;
      double dj, dt;
    } probes[] = {
        {"residual-grid-oscillator", model_id::oscillator12, osc, 1.0, 0.1},
        {"residual-grid-modified", model_id::oscillator12_cubic, cub, 0.4, 0.1},
        {"residual-grid-ruled-surface", model_id::hirzebruch, model_params{}, 0.5, 0.05},
    };
    for (const auto& pr : probes) {
      const auto [j0, t0] = candidate(pr.id, pr.mp);
      double worst = 0.0;
      for (int i = 0; i < 9; ++i) {
        for (int k = 0; k < 9; ++k) {
          const double j = j0 + pr.dj * (i - 4) / 4.0;
          const double t = t0 + pr.dt * (k - 4) / 4.0;
          worst = std::max(worst, normalize(reduced_jet(pr.id, pr.mp, j, t)).nf.residual);
        }
      }
      rep.rows.push_back(bound_row(pr.key, 1e-9, worst));
    }
  }

  // CSV round-trip is byte-exact in both directions.
  {
    model_params fam;
    fam.a = 1.0;
    fam.b = 1.0;
    fam.nu1_spec = {1.0, 0.0, -1.0};
    fam.nu2_spec = {0.0, 3.0, -1.0};
    const auto curves =
        sample_diagram(model_id::normal_form, fam, 0.1, domain_window{-1.0, 1.0}, 21);
    const std::string text = emit_diagram_csv(model_id::normal_form, 0.1, curves);
    const bool diagram_ok =
        emit_diagram_csv(model_id::normal_form, 0.1, parse_diagram_csv(text).curves) == text;
    const auto loci = trace_locus(model_id::normal_form, fam,
                                  param_rect{-1.0, 1.0, -0.1, 0.9}, 21);
    const std::string ltext = emit_locus_csv(model_id::normal_form, loci);
    const bool locus_ok =
        emit_locus_csv(model_id::normal_form, parse_locus_csv(ltext).curves) == ltext;
    rep.rows.push_back(text_row("csv-round-trip", "identical",
                                diagram_ok && locus_ok ? "identical" : "different"));
  }
}

std::string kinds_of(const std::vector<flip_event>& events) {
  std::string s;
  for (const auto& e : events) {
    if (!s.empty()) s += ",";
    s += side_name(e.side) + "=" + flip_kind_name(e.kind);
  }
  return s.empty() ? "none" : s;
}

void pinned_rows(selfcheck_report& rep) {
  // Oscillator example at its organizing point (-4, 1/2).
  model_params osc;
  osc.epsilon = 0.125;
  const auto [oj, ot] = candidate(model_id::oscillator12, osc);
  const auto on = run_normalize(model_id::oscillator12, osc, oj, ot);
  rep.rows.push_back(num_row("oscillator-a", 4.0, on.nf.a, 1e-6, true));
  rep.rows.push_back(bound_row("oscillator-nu1", 1e-8, on.nf.nu1));
  rep.rows.push_back(bound_row("oscillator-nu2", 1e-8, on.nf.nu2));
  rep.rows.push_back(num_row("oscillator-b-q6", 3.0 / 256.0, on.nf.b_q6, 1e-6, true));
  rep.rows.push_back(num_row("oscillator-b-u3", 1.0 / 64.0, on.nf.u3_coeff, 1e-6, true));
  rep.rows.push_back(
      num_row("oscillator-d2nu1-dj2", 1.0 / 32.0, on.derivs.d2_nu1_dj2, 1e-4, true));
  rep.rows.push_back(num_row("oscillator-dnu1-dt", -4.0, on.derivs.d_nu1_dt, 1e-4, true));
  rep.rows.push_back(
      num_row("oscillator-dnu2-dj", -1.0 / 32.0, on.derivs.d_nu2_dj, 1e-4, true));
  rep.rows.push_back(text_row("oscillator-saddle-node", "pass",
                              on.saddle.passes ? "pass" : "fail"));
  rep.rows.push_back(
      num_row("oscillator-concavity-ratio", 4.0 / 3.0, on.concavity.ratio, 1e-4, true));
  rep.rows.push_back(text_row("oscillator-concavity-verdict", "OppositeDirection",
                              verdict_name(on.concavity.verdict)));

  // Ruled-surface example at its organizing point (2, 1/5).
  const auto [hj, ht] = candidate(model_id::hirzebruch, model_params{});
  const auto hn = run_normalize(model_id::hirzebruch, model_params{}, hj, ht);
  rep.rows.push_back(num_row("ruled-surface-a", -0.8, hn.nf.a, 1e-4, true));
  rep.rows.push_back(num_row("ruled-surface-b-q6", -0.15, hn.nf.b_q6, 1e-4, true));
  rep.rows.push_back(
      num_row("ruled-surface-d2nu1-dj2", -0.4, hn.derivs.d2_nu1_dj2, 1e-4, true));
  // Quoted table value; the measurement is stable under step refinement and
  // reproducibly disagrees (see README, "Known reference discrepancies").
  rep.rows.push_back(
      num_row("ruled-surface-dnu1-dt", 0.4, hn.derivs.d_nu1_dt, 1e-4, true, true));
  rep.rows.push_back(
      num_row("ruled-surface-dnu2-dj", -0.4, hn.derivs.d_nu2_dj, 1e-4, true));
  rep.rows.push_back(bound_row("ruled-surface-axis-lambda2", 1e-8, hn.lambda2_origin));
  rep.rows.push_back(
      num_row("ruled-surface-concavity-ratio", 4.0 / 3.0, hn.concavity.ratio, 1e-4, true));
  rep.rows.push_back(text_row("ruled-surface-concavity-verdict", "OppositeDirection",
                              verdict_name(hn.concavity.verdict)));

  // Modified oscillator: the verdict itself is the pinned fact.
  model_params cub;
  cub.epsilon = 9.0 / 256.0;
  const auto [cj, ct] = candidate(model_id::oscillator12_cubic, cub);
  const auto cn = run_normalize(model_id::oscillator12_cubic, cub, cj, ct);
  rep.rows.push_back(text_row("modified-saddle-node", "pass",
                              cn.saddle.passes ? "pass" : "fail"));
  rep.rows.push_back(bound_row("modified-residual", 1e-9, cn.nf.residual));
  rep.rows.push_back(text_row("modified-double-flip", "affirmed",
                              cn.affirmed ? "affirmed" : "not affirmed"));

  // Flip loci of the oscillator at t = 3/5.
  {
    const auto events = solve_flip_locus(model_id::oscillator12, osc, 0.6,
                                         default_window(model_id::oscillator12, osc));
    rep.rows.push_back(
        num_row("oscillator-flip-count", 2.0, static_cast<double>(events.size()), 0.0,
                false));
    rep.rows.push_back(
        text_row("oscillator-flip-kinds", "Minus=Flip,Plus=DualFlip", kinds_of(events)));
    if (events.size() == 2) {
      const double worst = std::max(
          std::abs(events[0].j0 - osc_root(0.125, 0.6, -1.0)) /
              std::abs(osc_root(0.125, 0.6, -1.0)),
          std::abs(events[1].j0 - osc_root(0.125, 0.6, +1.0)) /
              std::abs(osc_root(0.125, 0.6, +1.0)));
      rep.rows.push_back(bound_row("oscillator-flip-positions", 1e-6, worst));
      const double s3 = std::sqrt(3.0);
      rep.rows.push_back(num_row("oscillator-flip-nu2-minus", 3.0 * (s3 - 1.0) / 20.0,
                                 events[0].nu2_at, 1e-6, true));
      rep.rows.push_back(num_row("oscillator-flip-nu2-plus", -3.0 * (s3 + 1.0) / 20.0,
                                 events[1].nu2_at, 1e-6, true));
    }
  }

  // Flip loci of the ruled surface at t = 2/5.
  {
    const auto events =
        solve_flip_locus(model_id::hirzebruch, model_params{}, 0.4,
                         default_window(model_id::hirzebruch, model_params{}));
    rep.rows.push_back(num_row("ruled-surface-flip-count", 2.0,
                               static_cast<double>(events.size()), 0.0, false));
    // Quoted label table; it contradicts the sign rule a*nu2 at a < 0 that the
    // same derivation states, and the computation follows the sign rule
    // (see README, "Known reference discrepancies").
    rep.rows.push_back(text_row("ruled-surface-flip-kinds", "Minus=Flip,Plus=DualFlip",
                                kinds_of(events), true));
    if (events.size() == 2) {
      const double worst =
          std::max(std::abs(events[0].j0 - ruled_root(0.4, -1.0)) / ruled_root(0.4, -1.0),
                   std::abs(events[1].j0 - ruled_root(0.4, +1.0)) / ruled_root(0.4, +1.0));
      rep.rows.push_back(bound_row("ruled-surface-flip-positions", 1e-6, worst));
      const double s55 = std::sqrt(55.0);
      rep.rows.push_back(num_row("ruled-surface-flip-nu2-minus", 4.0 * s55 / 15.0,
                                 events[0].nu2_at, 1e-6, true));
      rep.rows.push_back(num_row("ruled-surface-flip-nu2-plus", -4.0 * s55 / 15.0,
                                 events[1].nu2_at, 1e-6, true));
    }
  }

  // Degenerate family nu1 = j^2 - t, nu2 = 2j - t: ratio exactly 1, verdict
  // Degenerate, and the normalize command reports completed-negative.
  {
    model_params fam;
    fam.a = 1.0;
    fam.b = 1.0;
    fam.nu1_spec = {1.0, 0.0, -1.0};
    fam.nu2_spec = {0.0, 2.0, -1.0};
    const auto fn = run_normalize(model_id::normal_form, fam, 0.0, 0.0);
    rep.rows.push_back(num_row("degenerate-family-ratio", 1.0, fn.concavity.ratio, 1e-8,
                               false));
    rep.rows.push_back(text_row("degenerate-family-verdict", "Degenerate",
                                verdict_name(fn.concavity.verdict)));
    rep.rows.push_back(num_row("degenerate-family-exit", 2.0,
                               static_cast<double>(fn.exit_code), 0.0, false));
  }
}

}  // namespace

selfcheck_report run_selfcheck() {
  const auto start = std::chrono::steady_clock::now();
  selfcheck_report rep;
  property_rows(rep);
  pinned_rows(rep);
  for (const auto& row : rep.rows) {
    if (!row.pass) {
      ++rep.failures;
      if (row.known_discrepancy) ++rep.known_failures;
    }
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string format_selfcheck(const selfcheck_report& report) {
  std::string out;
  std::size_t key_w = 0, exp_w = 0;
  for (const auto& r : report.rows) {
    key_w = std::max(key_w, r.key.size());
    exp_w = std::max(exp_w, r.expected.size());
  }
  for (const auto& r : report.rows) {
    out += r.pass ? "[ ok ] " : "[FAIL] ";
    out += r.key + std::string(key_w - r.key.size() + 2, ' ');
    out += "expected " + r.expected + std::string(exp_w - r.expected.size() + 2, ' ');
    out += "actual " + r.actual;
    if (!r.pass && r.known_discrepancy) out += "  (known discrepancy, see README)";
    out += "\n";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu checks, %d failed (%d known discrepancies), %.2f s\n",
                report.rows.size(), report.failures, report.known_failures,
                report.seconds);
  out += buf;
  return out;
}

}  // namespace biflip
