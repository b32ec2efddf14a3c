#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "modereg/mode_seek.hpp"

namespace modereg {

//! Hausdorff distance between two finite sets of reals. Throws
//! UndefinedDistanceError when either set is empty.
double hausdorff(std::span<const double> a, std::span<const double> b);

struct IsePoint {
  double x;
  double haus;   // Hausdorff distance, or the penalty distance when undefined
  bool defined;  // both sets nonempty
};

struct IseReport {
  double ise = 0.0;
  std::vector<IsePoint> per_point;
  double delta = 0.0;
  int undefined_points = 0;
  //! Squared distance charged at a grid point where exactly one of the sets
  //! is empty: the squared y-range of the truth modes over the whole grid
  //! (1 when that range is zero).
  double penalty = 0.0;
};

//! sum_k Haus(estimated(x_k), truth(x_k))^2 * delta. Throws GridMismatchError
//! unless both curves use the same grid.
IseReport empirical_ise(const ModeCurves& estimated, const ModeCurves& truth);

//! The penalty distance (not squared) empirical_ise uses for `truth`.
double ise_penalty_distance(const ModeCurves& truth);

//! Squared-distance contribution of one grid point, before the delta factor.
double ise_term(const ModeSet& estimated, const ModeSet& truth, double penalty_distance);

void write_csv(std::ostream& os, const IseReport& report);
void write_csv(std::ostream& os, const ModeCurves& curves);

}  // namespace modereg
