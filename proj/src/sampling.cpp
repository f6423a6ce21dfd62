#include "drek/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drek {

WeightVector make_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("make_weights: weights must be finite and non-negative");
    }
    total += w;
  }
  return {std::move(weights), total};
}

WeightVector residual_row_weights(const DenseMatrix& r) {
  return make_weights(row_sq_norms(r));
}

WeightVector residual_col_weights(const DenseMatrix& r_hat) {
  return make_weights(col_sq_norms(r_hat));
}

double build_prefix(std::span<const double> weights, std::vector<double>& prefix) {
  prefix.resize(weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    run += weights[i];
    prefix[i] = run;
  }
  return run;
}

std::optional<std::size_t> sample_from_prefix(std::span<const double> prefix,
                                              std::span<const double> weights, RngStream& rng) {
  const double total = prefix.empty() ? 0.0 : prefix.back();
  const double u = rng.uniform01();  // always consume one draw, even if degenerate
  if (!(total > 0.0)) return std::nullopt;
  const double target = u * total;
  auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
  std::size_t idx = it == prefix.end() ? prefix.size() - 1
                                       : static_cast<std::size_t>(it - prefix.begin());
  // Rounding can park target on a trailing zero-weight slot; walk back to the
  // nearest index that actually carries mass.
  while (idx > 0 && weights[idx] == 0.0) --idx;
  return idx;
}

std::optional<std::size_t> categorical_sample(const WeightVector& w, RngStream& rng) {
  std::vector<double> prefix;
  build_prefix(w.weights, prefix);
  return sample_from_prefix(prefix, w.weights, rng);
}

}  // namespace drek
