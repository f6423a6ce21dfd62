#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "drek/dense_matrix.hpp"
#include "drek/rng.hpp"

namespace drek {

// Non-negative weights plus their running total. total == 0 is legal and
// means "nothing left to sample": zero residual weights signal that the
// corresponding iterate has converged, so the sampler reports it as a
// distinct outcome instead of failing.
struct WeightVector {
  std::vector<double> weights;
  double total = 0.0;
};

WeightVector make_weights(std::vector<double> weights);

// Row weights for selecting a working row of A from r = B - AX - Z.
WeightVector residual_row_weights(const DenseMatrix& r);
// Column weights from the transposed residual layout: entry j is the squared
// norm of column j of the argument.
WeightVector residual_col_weights(const DenseMatrix& r_hat);

// Inverse-CDF draw: index i with probability weights[i] / total, one uniform
// variate consumed per call. Returns nullopt when total == 0.
std::optional<std::size_t> categorical_sample(const WeightVector& w, RngStream& rng);

// Allocation-free core for the solver loop: prefix must have been filled by
// build_prefix from the current weights.
double build_prefix(std::span<const double> weights, std::vector<double>& prefix);
std::optional<std::size_t> sample_from_prefix(std::span<const double> prefix,
                                              std::span<const double> weights, RngStream& rng);

}  // namespace drek
