#include "georoute/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace georoute {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
  if (b <= a) return 0.0;
  // A few fixed panels first so that narrow features are not skipped.
  const int panels = 8;
  double h = (b - a) / panels, total = 0.0;
  for (int i = 0; i < panels; ++i) {
    double lo = a + i * h, hi = i + 1 == panels ? b : a + (i + 1) * h;
    double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, lo, hi, fa, fm, fb, whole, eps / panels, 48);
  }
  return total;
}

void check_range(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("range must be positive and finite");
}

}  // namespace

SlicingStrategy parse_slicing(std::string_view s) {
  if (s == "equal-progress" || s == "progress" || s == "ring") return SlicingStrategy::EqualProgress;
  if (s == "equal-area" || s == "area") return SlicingStrategy::EqualArea;
  throw std::invalid_argument("unknown slicing strategy '" + std::string(s) + "'");
}

std::string_view slicing_name(SlicingStrategy s) {
  return s == SlicingStrategy::EqualProgress ? "equal-progress" : "equal-area";
}

int SlicingGeometry::ppa_slice(double progress) const {
  for (int i = 0; i + 1 < subarea_count; ++i)
    if (progress >= ppa_bounds[i + 1]) return i;
  return subarea_count - 1;
}

int SlicingGeometry::npa_slice(double progress) const {
  for (int i = 0; i + 1 < subarea_count; ++i)
    if (progress >= npa_bounds[i + 1]) return i;
  return subarea_count - 1;
}

namespace {
// theta - sin(theta) cos(theta), the segment area of a unit circle with half-angle theta
double segment_shape(double theta) {
  if (theta < 1e-2) {
    double t2 = theta * theta;
    return theta * t2 * (2.0 / 3.0 - t2 * (2.0 / 15.0 - t2 * (4.0 / 315.0)));
  }
  return theta - 0.5 * std::sin(2.0 * theta);
}
}  // namespace

double lens_area(double r1, double r2, double d) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  if (d >= r1 + r2) return 0.0;
  double small = std::min(r1, r2);
  if (d <= std::fabs(r1 - r2)) return kPi * small * small;
  // two circular segments cut by the common chord; atan2 keeps the thin
  // segment of a huge circle accurate
  double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  double h = 0.5 * std::sqrt(std::max(0.0, k)) / d;
  double a1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  double a2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d);
  return r1 * r1 * segment_shape(std::atan2(h, a1)) + r2 * r2 * segment_shape(std::atan2(h, a2));
}

double ppa_area(double R, double d) {
  check_range(R);
  if (std::isinf(d)) return 0.5 * kPi * R * R;
  if (!(d > R)) throw std::domain_error("terminal hop: destination within range");
  return lens_area(R, d, d);
}

double area_beyond(double R, double d, double t) {
  if (t <= -R) return kPi * R * R;
  if (t >= R) return 0.0;
  if (std::isinf(d)) return R * R * std::acos(t / R) - t * std::sqrt(R * R - t * t);
  return lens_area(R, d - t, d);
}

double progress_band_area(double R, double d, double t_lo, double t_hi) {
  t_lo = std::max(t_lo, -R);
  t_hi = std::min(t_hi, R);
  if (t_hi <= t_lo) return 0.0;
  const double eps = 1e-9 * kPi * R * R;
  if (std::isinf(d)) {
    auto strip = [R](double u) { return 2.0 * std::sqrt(std::max(0.0, R * R - u * u)); };
    return adaptive_simpson(strip, t_lo, t_hi, eps);
  }
  // Points at distance r from the destination lying inside the sender's disk
  // form an arc of length 2 r acos((r^2 + d^2 - R^2) / (2 r d)).
  auto chord = [R, d](double r) {
    if (r <= 0.0) return 0.0;
    double c = std::clamp((r * r + d * d - R * R) / (2.0 * r * d), -1.0, 1.0);
    return 2.0 * r * std::acos(c);
  };
  return adaptive_simpson(chord, std::max(0.0, d - t_hi), d - t_lo, eps);
}

namespace {

double solve_bound(double R, double d, double target_beyond, double lo, double hi) {
  // area_beyond is decreasing in t
  for (int i = 0; i < 200 && hi - lo > 1e-14 * R; ++i) {
    double mid = 0.5 * (lo + hi);
    (area_beyond(R, d, mid) > target_beyond ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SlicingGeometry build(double R, double d, int N, SlicingStrategy strategy, bool with_areas = true) {
  check_range(R);
  if (N < 1) throw std::invalid_argument("subarea count must be at least 1");
  SlicingGeometry g;
  g.range = R;
  g.remaining_distance = d;
  g.subarea_count = N;
  g.strategy = strategy;
  g.far_field = std::isinf(d);
  g.ppa_area = ppa_area(R, d);
  g.npa_area = kPi * R * R - g.ppa_area;
  g.zeta = g.ppa_area / (kPi * R * R);

  g.ppa_bounds.resize(N + 1);
  g.npa_bounds.resize(N + 1);
  g.ppa_bounds[0] = R;
  g.ppa_bounds[N] = 0.0;
  g.npa_bounds[0] = 0.0;
  g.npa_bounds[N] = -R;
  for (int i = 1; i < N; ++i) {
    if (strategy == SlicingStrategy::EqualProgress) {
      g.ppa_bounds[i] = R * (N - i) / N;
      g.npa_bounds[i] = -R * i / N;
    } else {
      g.ppa_bounds[i] = solve_bound(R, d, g.ppa_area * i / N, 0.0, R);
      g.npa_bounds[i] = solve_bound(R, d, g.ppa_area + g.npa_area * i / N, -R, 0.0);
    }
  }

  if (!with_areas) return g;
  g.subareas.resize(2 * N);
  double ppa_sum = 0.0, npa_sum = 0.0;
  for (int i = 0; i < N; ++i) {
    g.subareas[i] = progress_band_area(R, d, g.ppa_bounds[i + 1], g.ppa_bounds[i]);
    g.subareas[N + i] = progress_band_area(R, d, g.npa_bounds[i + 1], g.npa_bounds[i]);
    ppa_sum += g.subareas[i];
    npa_sum += g.subareas[N + i];
  }
  // Spread the quadrature residual so the slices partition the closed-form
  // areas exactly.
  for (int i = 0; i < N; ++i) {
    g.subareas[i] *= g.ppa_area / ppa_sum;
    g.subareas[N + i] *= g.npa_area / npa_sum;
  }
  return g;
}

}  // namespace

SlicingGeometry slice_subareas(double R, double d, int N, SlicingStrategy strategy) {
  if (!(d > R)) throw std::domain_error("terminal hop: destination within range");
  return build(R, d, N, strategy);
}

SlicingGeometry slice_far_field(double R, int N, SlicingStrategy strategy) {
  return build(R, std::numeric_limits<double>::infinity(), N, strategy);
}

SlicingGeometry slice_bounds(double R, double d, int N, SlicingStrategy strategy) {
  if (!(d > R)) throw std::domain_error("terminal hop: destination within range");
  return build(R, d, N, strategy, false);
}

SlicingGeometry slice_for_hop(double R, double d, int N, SlicingStrategy strategy,
                              double far_field_ratio) {
  if (d / R > far_field_ratio) return slice_far_field(R, N, strategy);
  return slice_subareas(R, d, N, strategy);
}

}  // namespace georoute
