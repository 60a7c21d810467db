#include "btl/theory.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <vector>

namespace btl {

namespace {

void check_variance_args(int n, int k, double kappa) {
  if (n < 2 || k < 1 || k >= n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < n");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::InvalidArgument, "kappa must be finite and nonnegative");
  }
}

struct Point1 {
  double x;
  double f;
};

// Golden-section search for a maximum of f on [lo, hi].
Point1 golden_max(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Point1{c, fc} : Point1{d, fd};
}

// Dense grid over [lo, hi], then golden-section inside the best cell pair.
// Endpoints are kept as candidates since the maximum often sits on them.
Point1 maximize_1d(const std::function<double(double)>& f, double lo, double hi, int cells) {
  if (hi <= lo) return {lo, f(lo)};
  const double h = (hi - lo) / cells;
  Point1 best{lo, f(lo)};
  int best_i = 0;
  for (int i = 1; i <= cells; ++i) {
    const double x = i == cells ? hi : lo + i * h;
    const double fx = f(x);
    if (fx > best.f) {
      best = {x, fx};
      best_i = i;
    }
  }
  const double a = lo + std::max(0, best_i - 1) * h;
  const double b = best_i + 1 >= cells ? hi : lo + (best_i + 1) * h;
  const Point1 refined = golden_max(f, a, b);
  return refined.f > best.f ? refined : best;
}

using Point2 = std::array<double, 2>;

// Euclidean projection onto {x, y >= 0, x + y <= kappa}.
Point2 project_triangle(Point2 p, double kappa) {
  p[0] = std::max(p[0], 0.0);
  p[1] = std::max(p[1], 0.0);
  const double excess = p[0] + p[1] - kappa;
  if (excess > 0.0) {
    p[0] -= 0.5 * excess;
    p[1] -= 0.5 * excess;
    if (p[0] < 0.0) {
      p = {0.0, kappa};
    } else if (p[1] < 0.0) {
      p = {kappa, 0.0};
    }
  }
  return p;
}

// Nelder-Mead maximization of f on the projected triangle.
Point2 nelder_mead_max(const std::function<double(Point2)>& f, Point2 start, double step,
                       double kappa) {
  const auto g = [&](Point2 p) { return f(project_triangle(p, kappa)); };
  std::array<Point2, 3> s{start, Point2{start[0] + step, start[1]}, Point2{start[0], start[1] + step}};
  std::array<double, 3> v{g(s[0]), g(s[1]), g(s[2])};
  for (int it = 0; it < 4000; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    const auto best = idx[0], mid = idx[1], worst = idx[2];
    const double spread = std::abs(v[best] - v[worst]);
    const double size = std::max(std::abs(s[best][0] - s[worst][0]), std::abs(s[best][1] - s[worst][1]));
    if (spread <= 1e-15 * std::abs(v[best]) && size <= 1e-12 * std::max(1.0, kappa)) break;
    if (size <= 1e-14 * std::max(1.0, kappa)) break;
    const Point2 centroid{0.5 * (s[best][0] + s[mid][0]), 0.5 * (s[best][1] + s[mid][1])};
    const auto along = [&](double t) {
      return Point2{centroid[0] + t * (s[worst][0] - centroid[0]),
                    centroid[1] + t * (s[worst][1] - centroid[1])};
    };
    const Point2 refl = along(-1.0);
    const double fr = g(refl);
    if (fr > v[best]) {
      const Point2 expd = along(-2.0);
      const double fe = g(expd);
      if (fe > fr) {
        s[worst] = expd;
        v[worst] = fe;
      } else {
        s[worst] = refl;
        v[worst] = fr;
      }
    } else if (fr > v[mid]) {
      s[worst] = refl;
      v[worst] = fr;
    } else {
      const Point2 contr = fr > v[worst] ? along(-0.5) : along(0.5);
      const double fc = g(contr);
      if (fc > std::max(fr, v[worst])) {
        s[worst] = contr;
        v[worst] = fc;
      } else {
        for (int i : {mid, worst}) {
          s[i] = {s[best][0] + 0.5 * (s[i][0] - s[best][0]), s[best][1] + 0.5 * (s[i][1] - s[best][1])};
          v[i] = g(s[i]);
        }
      }
    }
  }
  const auto at = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  return project_triangle(s[at], kappa);
}

}  // namespace

VarianceResult variance_mle(int n, int k, double kappa) {
  check_variance_args(n, k, kappa);
  if (kappa == 0.0) return {mle_variance_objective(n, k, 0.0, 0.0), 0.0, 0.0};
  const auto on_boundary = [&](double x) { return mle_variance_objective(n, k, x, kappa - x); };
  const Point1 best = maximize_1d(on_boundary, 0.0, kappa, 4000);
  return {best.f, best.x, kappa - best.x};
}

VarianceResult variance_spectral(int n, int k, double kappa) {
  check_variance_args(n, k, kappa);
  if (kappa == 0.0) return {spectral_variance_objective(n, k, 0.0, 0.0), 0.0, 0.0};

  constexpr int kCells = 1000;
  const double h = kappa / kCells;
  std::vector<double> num1(kCells + 1), num2(kCells + 1), den1(kCells + 1), den2(kCells + 1);
  for (int i = 0; i <= kCells; ++i) {
    const double x = i * h;
    const double a = 1.0 + std::exp(x);
    const double b = 1.0 + std::exp(-x);
    num1[i] = k * sigmoid_prime(x) * a * a;
    num2[i] = (n - k) * sigmoid_prime(x) * b * b;
    den1[i] = k * sigmoid(x);
    den2[i] = (n - k) * sigmoid(-x);
  }
  double best_f = -1.0;
  int bi = 0, bj = 0;
  for (int i = 0; i <= kCells; ++i) {
    for (int j = 0; i + j <= kCells; ++j) {
      const double den = den1[i] + den2[j];
      const double f = n * (num1[i] + num2[j]) / (den * den);
      if (f > best_f) {
        best_f = f;
        bi = i;
        bj = j;
      }
    }
  }

  const auto obj = [&](Point2 p) { return spectral_variance_objective(n, k, p[0], p[1]); };
  std::vector<Point2> candidates{{bi * h, bj * h}};
  candidates.push_back(nelder_mead_max(obj, candidates.front(), h, kappa));
  // The maximizer can sit on an edge of the triangle, where a projected
  // simplex converges slowly; polish along each edge as well.
  const auto diag = maximize_1d([&](double x) { return obj({x, kappa - x}); }, 0.0, kappa, 200);
  candidates.push_back({diag.x, kappa - diag.x});
  const auto axis1 = maximize_1d([&](double x) { return obj({x, 0.0}); }, 0.0, kappa, 200);
  candidates.push_back({axis1.x, 0.0});
  const auto axis2 = maximize_1d([&](double y) { return obj({0.0, y}); }, 0.0, kappa, 200);
  candidates.push_back({0.0, axis2.x});

  VarianceResult out{-1.0, 0.0, 0.0};
  for (const auto& c : candidates) {
    const double f = obj(c);
    if (f > out.value) out = {f, c[0], c[1]};
  }
  return out;
}

VarianceResult effective_variance(int n, int k, double kappa, Method method) {
  return method == Method::Mle ? variance_mle(n, k, kappa) : variance_spectral(n, k, kappa);
}

void validate(const TheoryInput& in) {
  if (in.n < 2 || in.k < 1 || 2 * in.k > in.n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= n/2");
  if (!(in.p > 0.0 && in.p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  if (in.L < 1) throw Error(ErrorCode::InvalidArgument, "L must be at least 1");
  if (!(in.delta >= 0.0) || !(in.delta <= in.kappa) || !std::isfinite(in.kappa)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 <= delta <= kappa < inf");
  }
}

double snr(const TheoryInput& in, Method method) {
  validate(in);
  const double var = effective_variance(in.n, in.k, in.kappa, method).value;
  return in.n * in.p * in.L * in.delta * in.delta / var;
}

RecoveryExponent partial_recovery_exponent(double snr_value, int n, int k) {
  if (!(snr_value >= 0.0)) throw Error(ErrorCode::InvalidArgument, "SNR must be nonnegative");
  if (k < 1 || 2 * k > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= n/2");
  if (snr_value == 0.0) return {};
  const double root = std::sqrt(snr_value);
  const double margin = std::max(0.0, root / 2.0 - std::log(static_cast<double>(n - k) / k) / root);
  const double e = 0.5 * margin * margin;
  return {e, std::min(1.0, std::exp(-e))};
}

Threshold exact_recovery_threshold(int n, int k, double kappa, double p, int L, Method method) {
  if (k < 1 || n - k < 1) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < n");
  if (!(p > 0.0 && p <= 1.0) || L < 1) throw Error(ErrorCode::InvalidArgument, "need 0 < p <= 1, L >= 1");
  const double var = effective_variance(n, k, kappa, method).value;
  const double logs = std::sqrt(std::log(static_cast<double>(k))) +
                      std::sqrt(std::log(static_cast<double>(n - k)));
  const double crit = std::sqrt(2.0 * var * logs * logs / (n * p * L));
  return {crit, logs == 0.0};
}

Threshold exact_recovery_threshold_two_piece(int n, int k, double p, int L, Method method) {
  Threshold t = exact_recovery_threshold(n, k, 0.0, p, L, method);
  for (int it = 0; it < 100; ++it) {
    const Threshold next = exact_recovery_threshold(n, k, t.delta_crit, p, L, method);
    const bool done = std::abs(next.delta_crit - t.delta_crit) <= 1e-12 * std::max(1.0, t.delta_crit);
    t = next;
    if (done) break;
  }
  return t;
}

}  // namespace btl
