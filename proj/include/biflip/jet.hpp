#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace biflip {

/// Truncated bivariate Taylor expansion around the origin in canonical
/// coordinates (q, p).  Coefficient (m, n) multiplies q^m p^n; every pair with
/// m + n > degree_cap is identically zero.  Arithmetic never raises the cap:
/// products and brackets truncate to it.
template <typename T>
struct jet {
  int degree_cap = 6;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> coeffs;

  jet() : jet(6) {}

  explicit jet(int cap)
      : degree_cap(cap),
        coeffs(Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(cap + 1, cap + 1)) {
    if (cap < 2) throw std::invalid_argument("jet: degree_cap must be >= 2");
  }

  /// Coefficient of q^m p^n (zero outside the cap).
  T operator()(int m, int n) const {
    if (m < 0 || n < 0 || m + n > degree_cap) return T(0);
    return coeffs(m, n);
  }

  /// Mutable access; (m, n) must satisfy m + n <= degree_cap.
  T& at(int m, int n) {
    if (m < 0 || n < 0 || m + n > degree_cap)
      throw std::invalid_argument("jet: exponent pair exceeds degree_cap");
    return coeffs(m, n);
  }
};

namespace detail {

template <typename T>
void require_same_cap(const jet<T>& a, const jet<T>& b, const char* op) {
  if (a.degree_cap != b.degree_cap)
    throw std::invalid_argument(std::string(op) + ": mismatched degree_cap");
}

}  // namespace detail

/// Constant jet with the given value.
template <typename T>
jet<T> jet_const(T value, int cap = 6) {
  jet<T> r(cap);
  r.at(0, 0) = value;
  return r;
}

/// The coordinate monomial q.
template <typename T = double>
jet<T> jet_q(int cap = 6) {
  jet<T> r(cap);
  r.at(1, 0) = T(1);
  return r;
}

/// The coordinate monomial p.
template <typename T = double>
jet<T> jet_p(int cap = 6) {
  jet<T> r(cap);
  r.at(0, 1) = T(1);
  return r;
}

template <typename T>
jet<T> operator+(const jet<T>& a, const jet<T>& b) {
  detail::require_same_cap(a, b, "jet add");
  jet<T> r(a.degree_cap);
  r.coeffs = a.coeffs + b.coeffs;
  return r;
}

template <typename T>
jet<T> operator-(const jet<T>& a, const jet<T>& b) {
  detail::require_same_cap(a, b, "jet sub");
  jet<T> r(a.degree_cap);
  r.coeffs = a.coeffs - b.coeffs;
  return r;
}

template <typename T>
jet<T> operator-(const jet<T>& a) {
  jet<T> r(a.degree_cap);
  r.coeffs = -a.coeffs;
  return r;
}

template <typename T>
jet<T> operator*(T s, const jet<T>& a) {
  jet<T> r(a.degree_cap);
  r.coeffs = s * a.coeffs;
  return r;
}

template <typename T>
jet<T> operator*(const jet<T>& a, T s) {
  return s * a;
}

/// Coefficient-wise convolution truncated to the shared degree_cap.  Each
/// output coefficient sums symmetric pairs A(i)B(j) + A(j)B(i) in a fixed
/// order, which makes the product bitwise commutative (IEEE addition is
/// commutative) and downstream bracket antisymmetry exact.
template <typename T>
jet<T> jet_mul(const jet<T>& a, const jet<T>& b) {
  detail::require_same_cap(a, b, "jet_mul");
  const int cap = a.degree_cap;
  jet<T> r(cap);
  for (int mm = 0; mm <= cap; ++mm)
    for (int nn = 0; mm + nn <= cap; ++nn) {
      T acc = T(0);
      for (int m1 = 0; m1 <= mm; ++m1)
        for (int n1 = 0; n1 <= nn; ++n1) {
          const int m2 = mm - m1, n2 = nn - n1;
          const int i1 = m1 * (cap + 1) + n1;
          const int i2 = m2 * (cap + 1) + n2;
          if (i1 < i2)
            acc += a.coeffs(m1, n1) * b.coeffs(m2, n2) + a.coeffs(m2, n2) * b.coeffs(m1, n1);
          else if (i1 == i2)
            acc += a.coeffs(m1, n1) * b.coeffs(m1, n1);
        }
      r.coeffs(mm, nn) = acc;
    }
  return r;
}

template <typename T>
jet<T> operator*(const jet<T>& a, const jet<T>& b) {
  return jet_mul(a, b);
}

/// Partial derivative with respect to q (cap retained).
template <typename T>
jet<T> d_dq(const jet<T>& a) {
  jet<T> r(a.degree_cap);
  for (int m = 1; m <= a.degree_cap; ++m)
    for (int n = 0; m + n <= a.degree_cap; ++n)
      r.coeffs(m - 1, n) = T(m) * a.coeffs(m, n);
  return r;
}

/// Partial derivative with respect to p (cap retained).
template <typename T>
jet<T> d_dp(const jet<T>& a) {
  jet<T> r(a.degree_cap);
  for (int m = 0; m <= a.degree_cap; ++m)
    for (int n = 1; m + n <= a.degree_cap; ++n)
      r.coeffs(m, n - 1) = T(n) * a.coeffs(m, n);
  return r;
}

/// Largest absolute coefficient.
template <typename T>
T sup_norm(const jet<T>& a) {
  return a.coeffs.cwiseAbs().maxCoeff();
}

/// Lowest total degree carrying a nonzero coefficient; degree_cap + 1 if zero.
template <typename T>
int min_degree(const jet<T>& a) {
  for (int d = 0; d <= a.degree_cap; ++d)
    for (int m = 0; m <= d; ++m)
      if (a.coeffs(m, d - m) != T(0)) return d;
  return a.degree_cap + 1;
}

/// Evaluate the jet at a concrete point (q, p).
template <typename T>
T jet_eval(const jet<T>& a, T q, T p) {
  T acc = T(0);
  for (int m = a.degree_cap; m >= 0; --m) {
    T row = T(0);
    for (int n = a.degree_cap - m; n >= 0; --n) row = row * p + a.coeffs(m, n);
    acc = acc * q + row;
  }
  return acc;
}

/// Canonical Poisson bracket {F, G} = dF/dq dG/dp - dF/dp dG/dq, truncated.
template <typename T>
jet<T> poisson_bracket(const jet<T>& f, const jet<T>& g) {
  detail::require_same_cap(f, g, "poisson_bracket");
  return jet_mul(d_dq(f), d_dp(g)) - jet_mul(d_dp(f), d_dq(g));
}

/// Multiplicative reciprocal as a truncated series; constant term must be
/// nonzero.
template <typename T>
jet<T> jet_reciprocal(const jet<T>& a) {
  const T c0 = a(0, 0);
  if (c0 == T(0)) throw std::domain_error("jet_reciprocal: zero constant term");
  const int cap = a.degree_cap;
  // a = c0 (1 + e) with min_degree(e) >= 1, so the geometric series for
  // 1/(1 + e) terminates at the cap.
  jet<T> e = (T(1) / c0) * a;
  e.at(0, 0) -= T(1);
  jet<T> acc = jet_const(T(1), cap);
  jet<T> pw = jet_const(T(1), cap);
  for (int k = 1; k <= cap; ++k) {
    pw = jet_mul(pw, e);
    acc = (k % 2 == 1) ? acc - pw : acc + pw;
  }
  return (T(1) / c0) * acc;
}

/// Square root lift: S with S*S = A up to truncation and S(0,0) = +sqrt(A(0,0)).
/// Newton iteration S <- (S + A/S)/2 until stationary.
template <typename T>
jet<T> jet_sqrt(const jet<T>& a) {
  using std::sqrt;
  const T c0 = a(0, 0);
  if (!(c0 > T(0)))
    throw std::domain_error("jet_sqrt: constant term must be positive (branch singularity)");
  jet<T> s = jet_const(sqrt(c0), a.degree_cap);
  const T scale = sup_norm(a) + T(1);
  for (int it = 0; it < 50; ++it) {
    jet<T> next = T(0.5) * (s + jet_mul(a, jet_reciprocal(s)));
    const T diff = sup_norm(next - s);
    s = next;
    if (diff <= T(1e-15) * scale && it >= 2) break;
  }
  return s;
}

/// 2x2 linear map on (q, p); must be unimodular (canonical-form preserving).
template <typename T>
struct symplectic_map2 {
  Eigen::Matrix<T, 2, 2> entries = Eigen::Matrix<T, 2, 2>::Identity();
};

template <typename T>
bool is_unimodular(const symplectic_map2<T>& m, T tol = T(1e-12)) {
  using std::abs;
  return abs(m.entries.determinant() - T(1)) <= tol;
}

/// Compose A with the linear substitution (q, p) -> M (q, p).
template <typename T>
jet<T> substitute_linear(const jet<T>& a, const symplectic_map2<T>& m) {
  if (!is_unimodular(m))
    throw std::invalid_argument("substitute_linear: map is not unimodular");
  const int cap = a.degree_cap;
  jet<T> qq(cap), pp(cap);
  qq.at(1, 0) = m.entries(0, 0);
  qq.at(0, 1) = m.entries(0, 1);
  pp.at(1, 0) = m.entries(1, 0);
  pp.at(0, 1) = m.entries(1, 1);
  // Precomputed powers keep the substitution O(cap^2) products.
  std::vector<jet<T>> qpow(cap + 1, jet_const(T(1), cap));
  std::vector<jet<T>> ppow(cap + 1, jet_const(T(1), cap));
  for (int k = 1; k <= cap; ++k) {
    qpow[k] = jet_mul(qpow[k - 1], qq);
    ppow[k] = jet_mul(ppow[k - 1], pp);
  }
  jet<T> r(cap);
  for (int mm = 0; mm <= cap; ++mm)
    for (int nn = 0; mm + nn <= cap; ++nn) {
      const T c = a.coeffs(mm, nn);
      if (c == T(0)) continue;
      r = r + c * jet_mul(qpow[mm], ppow[nn]);
    }
  return r;
}

/// Truncated Lie-series transform e^{ad_F} H = H + {F,H} + {F,{F,H}}/2 + ...
/// F must have zero constant and linear parts (near-identity generator); for
/// generators of degree >= 3 the series terminates by degree bookkeeping.
template <typename T>
jet<T> lie_transform(const jet<T>& h, const jet<T>& f) {
  detail::require_same_cap(h, f, "lie_transform");
  if (f(0, 0) != T(0) || f(1, 0) != T(0) || f(0, 1) != T(0))
    throw std::invalid_argument("lie_transform: generator has constant or linear part");
  jet<T> result = h;
  jet<T> term = h;
  const int max_terms = 4 * h.degree_cap + 4;
  for (int k = 1; k <= max_terms; ++k) {
    term = (T(1) / T(k)) * poisson_bracket(f, term);
    if (sup_norm(term) == T(0)) return result;
    result = result + term;
  }
  throw std::invalid_argument(
      "lie_transform: series did not terminate (generator with quadratic part)");
}

}  // namespace biflip
