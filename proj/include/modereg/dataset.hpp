#pragma once

#include <span>
#include <vector>

namespace modereg {

//! Observed pairs (W_j, Y_j). There is deliberately no field for the true
//! covariate X.
class Dataset {
public:
  Dataset(std::vector<double> w, std::vector<double> y);

  std::size_t n() const noexcept { return w_.size(); }
  std::span<const double> w() const noexcept { return w_; }
  std::span<const double> y() const noexcept { return y_; }

  //! Same responses paired with a different covariate column.
  Dataset with_covariate(std::vector<double> w) const;

private:
  std::vector<double> w_, y_;
};

struct Bandwidths {
  double h1;
  double h2;

  Bandwidths(double h1_, double h2_);
};

//! Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> v);

//! Linear-interpolation quantile (R type 7), p in [0, 1].
double quantile(std::vector<double> v, double p);

}  // namespace modereg
