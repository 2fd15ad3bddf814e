#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <biflip/diagram.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

using namespace biflip;

namespace {

// Quartic-family test configurations: a = b = 1 with polynomial coefficient
// recipes, so every closed-form branch is checkable by hand.
model_params quartic_family(nu_spec nu1, nu_spec nu2) {
  model_params p;
  p.a = 1.0;
  p.b = 1.0;
  p.nu1_spec = nu1;
  p.nu2_spec = nu2;
  return p;
}

model_params family_a() {  // nu1 = j^2 - t, nu2 = 3j - t
  return quartic_family({1.0, 0.0, -1.0}, {0.0, 3.0, -1.0});
}

model_params family_b() {  // nu1 = j^2 - t, nu2 = 2j - t (degenerate tangency)
  return quartic_family({1.0, 0.0, -1.0}, {0.0, 2.0, -1.0});
}

const diagram_curve* find_branch(const std::vector<diagram_curve>& curves, branch_id br) {
  for (const auto& c : curves) {
    if (c.branch == br) return &c;
  }
  return nullptr;
}

int count_substr(const std::string& text, const std::string& needle) {
  int n = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("elliptic-everywhere window produces a single all-centre axis curve") {
  // nu1 = j^2 + 0.1 > 0 and the quartic discriminant stays negative on
  // [-0.3, 0.2], so the axis point is the only critical point and is a centre.
  const auto curves = sample_diagram(model_id::normal_form, family_a(), -0.1,
                                     domain_window{-0.3, 0.2}, 101);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].branch == branch_id::q1);
  CHECK(curves[0].samples.size() == 101);
  for (const auto& s : curves[0].samples) {
    CHECK(s.q == 0.0);
    CHECK(s.cls == point_class::centre);
    CHECK(s.h == 0.0);
  }
  CHECK(curves[0].samples.front().j == doctest::Approx(-0.3));
  CHECK(curves[0].samples.back().j == doctest::Approx(0.2));
}

TEST_CASE("branch structure after the transition: saddle window and outer branches") {
  const double t = 0.1;
  const auto curves =
      sample_diagram(model_id::normal_form, family_a(), t, domain_window{-1.0, 1.0}, 201);

  const auto* q1 = find_branch(curves, branch_id::q1);
  const auto* q2m = find_branch(curves, branch_id::q2_minus);
  const auto* q2p = find_branch(curves, branch_id::q2_plus);
  REQUIRE(q1 != nullptr);
  REQUIRE(q2m != nullptr);
  REQUIRE(q2p != nullptr);
  CHECK(q1->samples.size() == 201);

  // Axis point: saddle exactly where nu1 < 0 (|j| < sqrt(t)).
  int changes = 0;
  for (std::size_t k = 0; k < q1->samples.size(); ++k) {
    const auto& s = q1->samples[k];
    const double nu1 = s.j * s.j - t;
    if (std::abs(nu1) > 1e-6) {
      CHECK(s.cls == (nu1 < 0.0 ? point_class::saddle : point_class::centre));
    }
    CHECK(s.lambda_squared == doctest::Approx(-nu1).epsilon(1e-12));
    if (k > 0 && s.cls != q1->samples[k - 1].cls) {
      ++changes;
      // Near a class change the eigenvalue must be passing through zero.
      const double lo = std::abs(q1->samples[k - 1].lambda_squared);
      const double hi = std::abs(s.lambda_squared);
      const double step = std::abs(s.lambda_squared - q1->samples[k - 1].lambda_squared);
      CHECK(std::min(lo, hi) <= 2.0 * step);
    }
  }
  CHECK(changes == 2);

  // Outer branches live left of their existence boundaries and keep one class
  // each: with a > 0 the inner branch is a saddle ring, the outer a centre.
  const double sqrt_t = std::sqrt(t);
  for (const auto& s : q2m->samples) {
    CHECK(s.j <= -sqrt_t + 1e-12);
    CHECK(s.cls == point_class::saddle);
    CHECK(s.q > 0.0);
  }
  for (const auto& s : q2p->samples) {
    CHECK(s.j <= sqrt_t + 1e-12);
    CHECK(s.cls == point_class::centre);
    CHECK(s.q > 0.0);
  }
  CHECK(q2m->samples.back().j == doctest::Approx(-0.32).epsilon(0.1));
  CHECK(q2p->samples.back().j == doctest::Approx(0.31).epsilon(0.1));

  // Energy along every branch varies smoothly on this grid.
  const double dj = 2.0 / 200;
  for (const auto& c : curves) {
    for (std::size_t k = 1; k < c.samples.size(); ++k) {
      CHECK(std::abs(c.samples[k].h - c.samples[k - 1].h) <= 20.0 * dj);
    }
  }
}

TEST_CASE("numeric scan tracks the axis branch through a tangency") {
  // At the parameter where the axis eigenvalue touches zero (j = -4), the
  // curve must stay connected, never turn into a saddle, and dip to zero.
  model_params params;  // oscillator defaults: epsilon = 1/8
  const int n = 161;
  const domain_window window{-8.0, -0.01};
  const auto curves = sample_diagram(model_id::oscillator12, params, 0.5, window, n);
  REQUIRE(!curves.empty());

  const diagram_curve* axis = nullptr;
  for (const auto& c : curves) {
    bool all_axis = true;
    for (const auto& s : c.samples) all_axis = all_axis && std::abs(s.q) <= 1e-7;
    if (all_axis && c.samples.size() > 10) {
      axis = &c;
      break;
    }
  }
  REQUIRE(axis != nullptr);
  CHECK(axis->branch == branch_id::numeric);
  CHECK(axis->samples.size() == static_cast<std::size_t>(n));

  double best = 1e300;
  double best_j = 0.0;
  for (const auto& s : axis->samples) {
    CHECK(s.cls != point_class::saddle);
    if (std::abs(s.lambda_squared) < best) {
      best = std::abs(s.lambda_squared);
      best_j = s.j;
    }
  }
  const double dj = (window.j_max - window.j_min) / (n - 1);
  CHECK(std::abs(best_j - (-4.0)) <= 2.0 * dj);
  CHECK(best <= 1e-4);

  // The tracker never lets a curve jump in the (q, h) plane.
  for (const auto& c : curves) {
    for (std::size_t k = 1; k < c.samples.size(); ++k) {
      const double step = std::hypot(c.samples[k].q - c.samples[k - 1].q,
                                     c.samples[k].h - c.samples[k - 1].h);
      CHECK(step <= 1.0);
    }
  }
}

TEST_CASE("scan noise at a degenerate sample does not fragment the tracking") {
  // One grid sample of this run lands where the axis eigenvalue is within
  // 1e-7 of zero; there the scan's Newton polish can stop anywhere inside
  // the flat well and returns hundreds of copies of the one real critical
  // point.  The sampler must collapse them: the run has exactly the axis
  // curve plus the outer pair born at the fold, and no one-sample curves.
  model_params params;  // oscillator defaults: epsilon = 1/8
  const domain_window window = default_window(model_id::oscillator12, params);
  const auto curves = sample_diagram(model_id::oscillator12, params, 0.5, window, 201);

  REQUIRE(curves.size() == 3);
  CHECK(curves[0].samples.size() == 201);
  CHECK(curves[1].samples.size() == 50);
  CHECK(curves[2].samples.size() == 50);
  // The outer branches exist exactly for j > -4: both born at the first
  // grid point past the fold.
  CHECK(curves[1].samples.front().j == curves[2].samples.front().j);
  CHECK(curves[1].samples.front().j > -4.0);
  CHECK(curves[1].samples.front().j <= -4.0 + (window.j_max - window.j_min) / 200.0);
  for (const auto& c : curves) {
    CHECK(c.branch == branch_id::numeric);
    CHECK(c.samples.size() >= 2);
  }
}

TEST_CASE("sampling validates its window and model domain") {
  CHECK_THROWS_AS(
      sample_diagram(model_id::normal_form, family_a(), 0.0, domain_window{-1.0, 1.0}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sample_diagram(model_id::normal_form, family_a(), 0.0, domain_window{1.0, -1.0}, 10),
      std::invalid_argument);
  model_params params;
  CHECK_THROWS_AS(
      sample_diagram(model_id::oscillator12, params, 0.5, domain_window{-1.0, 0.5}, 10),
      std::domain_error);
}

TEST_CASE("zero-set tracing recovers a parabola in the parameter plane") {
  const auto curves = trace_locus(model_id::normal_form, family_a(),
                                  param_rect{-1.0, 1.0, -0.1, 0.9}, 201);
  std::vector<const locus_curve*> nu1_curves;
  for (const auto& c : curves) {
    if (c.kind == locus_kind::nu1_zero) nu1_curves.push_back(&c);
  }
  REQUIRE(!nu1_curves.empty());
  const locus_curve* main = nu1_curves[0];
  for (const auto* c : nu1_curves) {
    if (c->points.size() > main->points.size()) main = c;
  }
  CHECK(main->points.size() >= 100);
  double j_lo = 1e300, j_hi = -1e300;
  for (const auto& [j, t] : main->points) {
    CHECK(std::abs(t - j * j) <= 1e-3);
    CHECK(std::abs(nu_value(family_a().nu1_spec, j, t)) <= 1e-4);
    j_lo = std::min(j_lo, j);
    j_hi = std::max(j_hi, j);
  }
  CHECK(j_lo <= -0.9);
  CHECK(j_hi >= 0.9);
}

TEST_CASE("discriminant zero-set keeps only crossings where the outer branch exists") {
  // Family with nu2 = 2j - t: disc = t(t - 4j + 4) vanishes on the line t = 0,
  // but the outer branch exists only where nu2 <= 0, i.e. j <= t/2.
  const auto curves = trace_locus(model_id::normal_form, family_b(),
                                  param_rect{-1.0, 1.0, -0.101, 0.12}, 41);
  bool any_disc = false;
  double kept_max_j = -1e300;
  for (const auto& c : curves) {
    if (c.kind != locus_kind::disc_zero) continue;
    any_disc = true;
    for (const auto& [j, t] : c.points) {
      CHECK(std::abs(t) <= 1e-4);  // only the t = 0 component survives the filter
      const double nu1 = nu_value(family_b().nu1_spec, j, t);
      const double nu2 = nu_value(family_b().nu2_spec, j, t);
      CHECK(std::abs(disc_b(nu1, nu2, 1.0)) <= 2e-5);
      CHECK(j <= 1e-9);
      kept_max_j = std::max(kept_max_j, j);
    }
  }
  CHECK(any_disc);
  CHECK(kept_max_j >= -0.11);  // the kept piece reaches the last passing column
}

TEST_CASE("numeric model loci meet at the organizing point with opposite concavity") {
  model_params params;  // oscillator, epsilon = 1/8; tangency at (j,t) = (-4, 1/2)
  const auto curves =
      trace_locus(model_id::oscillator12, params, param_rect{-5.5, -2.5, 0.42, 0.58}, 81);

  const auto longest_of = [&](locus_kind kind) -> const locus_curve* {
    const locus_curve* best = nullptr;
    for (const auto& c : curves) {
      if (c.kind != kind) continue;
      if (!best || c.points.size() > best->points.size()) best = &c;
    }
    return best;
  };
  const auto t_near = [](const locus_curve* c, double j_target) {
    double best = 1e300, t_at = 0.0;
    for (const auto& [j, t] : c->points) {
      if (std::abs(j - j_target) < best) {
        best = std::abs(j - j_target);
        t_at = t;
      }
    }
    REQUIRE(best <= 0.1);
    return t_at;
  };

  const locus_curve* nu1 = longest_of(locus_kind::nu1_zero);
  const locus_curve* disc = longest_of(locus_kind::disc_zero);
  REQUIRE(nu1 != nullptr);
  REQUIRE(disc != nullptr);

  double d_nu1 = 1e300, d_disc = 1e300;
  for (const auto& [j, t] : nu1->points) {
    d_nu1 = std::min(d_nu1, std::hypot(j + 4.0, (t - 0.5) * 10.0));
  }
  for (const auto& [j, t] : disc->points) {
    d_disc = std::min(d_disc, std::hypot(j + 4.0, (t - 0.5) * 10.0));
  }
  CHECK(d_nu1 <= 0.12);
  CHECK(d_disc <= 0.12);

  // Second differences across the tangency: the nu1 curve opens upward in t,
  // the discriminant curve bends the other way.
  const double nu1_second =
      t_near(nu1, -3.2) - 2.0 * t_near(nu1, -4.0) + t_near(nu1, -4.8);
  CHECK(nu1_second > 1e-3);
  // The discriminant branch exists only on the nu2 <= 0 side, so measure its
  // bending one-sidedly against the tangency point.
  const double t0 = t_near(disc, -4.0);
  const double disc_second =
      t_near(disc, -3.2) - 2.0 * t_near(disc, -3.6) + t0;
  CHECK(disc_second < -2e-4);
  CHECK(t_near(disc, -3.2) < t0 - 1e-4);
}

TEST_CASE("zero-set tracing validates input and reports out-of-domain grids") {
  model_params params;
  CHECK_THROWS_AS(trace_locus(model_id::normal_form, family_a(),
                              param_rect{1.0, -1.0, 0.0, 1.0}, 11),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_locus(model_id::normal_form, family_a(),
                              param_rect{-1.0, 1.0, 0.0, 1.0}, 1),
                  std::invalid_argument);
  // Half of this rectangle sits outside the oscillator domain (j >= 0).
  CHECK_THROWS_WITH_AS(trace_locus(model_id::oscillator12, params,
                                   param_rect{-1.0, 1.0, 0.4, 0.6}, 21),
                       doctest::Contains("normalization failed"), std::runtime_error);
}

TEST_CASE("diagram CSV round-trips bitwise") {
  const auto curves =
      sample_diagram(model_id::normal_form, family_a(), 0.1, domain_window{-1.0, 1.0}, 41);
  const std::string text = emit_diagram_csv(model_id::normal_form, 0.1, curves);
  CHECK(text.substr(0, 25) == "model,t,branch,j,h,class\n");
  CHECK(text.find("\r") == std::string::npos);

  const auto parsed = parse_diagram_csv(text);
  CHECK(parsed.model == "normal-form");
  CHECK(parsed.t == 0.1);
  REQUIRE(parsed.curves.size() == curves.size());
  const std::string again = emit_diagram_csv(model_id::normal_form, 0.1, parsed.curves);
  CHECK(again == text);

  // Emission is deterministic.
  CHECK(emit_diagram_csv(model_id::normal_form, 0.1, curves) == text);

  // Rows are grouped by branch in declaration order.
  const std::size_t q1_pos = text.find(",Q1,");
  const std::size_t q2m_pos = text.find(",Q2Minus,");
  const std::size_t q2p_pos = text.find(",Q2Plus,");
  REQUIRE(q1_pos != std::string::npos);
  REQUIRE(q2m_pos != std::string::npos);
  REQUIRE(q2p_pos != std::string::npos);
  CHECK(q1_pos < q2m_pos);
  CHECK(q2m_pos < q2p_pos);
}

TEST_CASE("empty and malformed CSV inputs") {
  CHECK(emit_diagram_csv(model_id::normal_form, 0.0, {}) == "model,t,branch,j,h,class\n");
  CHECK(emit_locus_csv(model_id::normal_form, {}) == "model,kind,j,t\n");
  CHECK(parse_diagram_csv("model,t,branch,j,h,class\n").curves.empty());
  CHECK(parse_locus_csv("model,kind,j,t\n").curves.empty());
  CHECK_THROWS_AS(parse_diagram_csv("nope\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram_csv("model,t,branch,j,h,class\na,b,c\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram_csv("model,t,branch,j,h,class\nm,0,Q9,0,0,Centre\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram_csv("model,t,branch,j,h,class\nm,0,Q1,x,0,Centre\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_diagram_csv("model,t,branch,j,h,class\nm,0,Q1,0,0,Middling\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_locus_csv("model,kind,j,t\nm,Elsewhere,0,0\n"),
                  std::invalid_argument);
}

TEST_CASE("locus CSV round-trips bitwise") {
  const auto curves = trace_locus(model_id::normal_form, family_a(),
                                  param_rect{-1.0, 1.0, -0.1, 0.9}, 51);
  REQUIRE(!curves.empty());
  const std::string text = emit_locus_csv(model_id::normal_form, curves);
  const auto parsed = parse_locus_csv(text);
  CHECK(parsed.model == "normal-form");
  CHECK(emit_locus_csv(model_id::normal_form, parsed.curves) == text);
}

TEST_CASE("SVG output reflects branch patterns and classes") {
  const std::string empty = emit_svg({});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("<polyline") == std::string::npos);
  CHECK(count_substr(empty, "<line") == 2);

  const auto one = sample_diagram(model_id::normal_form, family_a(), -0.1,
                                  domain_window{-0.3, 0.2}, 41);
  const std::string single = emit_svg(one);
  CHECK(count_substr(single, "<polyline") == 1);
  CHECK(single.find("#1f77b4") != std::string::npos);   // centre colour
  CHECK(single.find("dasharray") == std::string::npos);  // axis branch is solid

  const auto full =
      sample_diagram(model_id::normal_form, family_a(), 0.1, domain_window{-1.0, 1.0}, 201);
  const std::string svg = emit_svg(full);
  CHECK(svg.find("stroke-dasharray=\"8 5\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray=\"10 4 2 4\"") != std::string::npos);
  CHECK(svg.find("#1f77b4") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);

  // Shifting the vertical coordinate by j changes the geometry, not the count.
  const std::string shifted = emit_svg(full, svg_style{true});
  CHECK(shifted != svg);
  CHECK(count_substr(shifted, "<polyline") == count_substr(svg, "<polyline"));
}

TEST_CASE("degenerate tangency line renders as marked points and matches the locus") {
  // Family with nu2 = 2j - t at t = 0: the discriminant vanishes identically,
  // the merged outer branch is degenerate along its whole extent.
  const auto curves = sample_diagram(model_id::normal_form, family_b(), 0.0,
                                     domain_window{-1.0, 1.0}, 21);
  const auto* merged = find_branch(curves, branch_id::q2_minus);
  REQUIRE(merged != nullptr);
  CHECK(merged->samples.size() >= 9);
  for (const auto& s : merged->samples) {
    CHECK(s.j <= 0.0);
    CHECK(s.cls == point_class::degenerate);
    CHECK(s.lambda_squared == 0.0);
  }
  CHECK(find_branch(curves, branch_id::q2_plus) == nullptr);

  const std::string svg = emit_svg(curves);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("fill=\"#111111\"") != std::string::npos);

  // Every merged-branch sample sits on the traced discriminant zero-set.
  const auto locus = trace_locus(model_id::normal_form, family_b(),
                                 param_rect{-1.0, 1.0, -0.101, 0.12}, 41);
  for (const auto& s : merged->samples) {
    if (s.j > -0.06) continue;  // the filter trims the last column before nu2 = 0
    double best_dj = 1e300, best_dt = 1e300;
    for (const auto& c : locus) {
      if (c.kind != locus_kind::disc_zero) continue;
      for (const auto& [j, t] : c.points) {
        if (std::abs(j - s.j) < best_dj ||
            (std::abs(j - s.j) == best_dj && std::abs(t) < best_dt)) {
          best_dj = std::abs(j - s.j);
          best_dt = std::abs(t - 0.0);
        }
      }
    }
    CHECK(best_dj <= 0.011);
    CHECK(best_dt <= 1e-4);
  }
}
