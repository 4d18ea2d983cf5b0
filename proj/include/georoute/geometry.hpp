#pragma once

#include <string_view>
#include <vector>

namespace georoute {

enum class SlicingStrategy { EqualProgress, EqualArea };

SlicingStrategy parse_slicing(std::string_view s);
std::string_view slicing_name(SlicingStrategy s);

struct SlicingGeometry {
  double range = 0.0;
  double remaining_distance = 0.0;  // infinite in the far-field model
  int subarea_count = 0;
  double ppa_area = 0.0;
  double npa_area = 0.0;
  // a_1..a_N in the PPA by decreasing progress, then a_{N+1}..a_{2N} in the
  // NPA by decreasing (less negative first) progress.
  std::vector<double> subareas;
  // Progress boundaries, length N+1 each: ppa from R down to 0, npa from 0
  // down to -R.
  std::vector<double> ppa_bounds;
  std::vector<double> npa_bounds;
  double zeta = 0.0;
  bool far_field = false;
  SlicingStrategy strategy = SlicingStrategy::EqualProgress;

  // 0-based slice index for a point of the given progress (positive for the
  // PPA, non-positive for the NPA).
  int ppa_slice(double progress) const;
  int npa_slice(double progress) const;
};

// Intersection area of two disks with radii r1, r2 whose centres are d apart.
double lens_area(double r1, double r2, double d);

double ppa_area(double R, double d);

// Area of the sender's disk whose progress toward the destination exceeds t,
// for t in [-R, R]. A non-finite d selects the half-plane limit.
double area_beyond(double R, double d, double t);

// Area with progress in [t_lo, t_hi], by adaptive Simpson over the chord
// length of circles centred on the destination.
double progress_band_area(double R, double d, double t_lo, double t_hi);

SlicingGeometry slice_subareas(double R, double d, int N,
                               SlicingStrategy strategy = SlicingStrategy::EqualProgress);

// Half-plane limit d -> infinity: zeta = 1/2 and slices become strips.
SlicingGeometry slice_far_field(double R, int N,
                                SlicingStrategy strategy = SlicingStrategy::EqualProgress);

// Bounds and lens areas only; subareas stays empty. Cheap enough per hop.
SlicingGeometry slice_bounds(double R, double d, int N, SlicingStrategy strategy);

// Far-field treatment when d / R exceeds far_field_ratio.
SlicingGeometry slice_for_hop(double R, double d, int N, SlicingStrategy strategy,
                              double far_field_ratio);

}  // namespace georoute
