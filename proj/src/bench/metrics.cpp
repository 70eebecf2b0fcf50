#include "safeaa/bench.hpp"

#include <cmath>

namespace safeaa::bench {

double shifted_gmean(const std::vector<double>& times, double sh) {
  if (times.empty()) throw std::invalid_argument("shifted_gmean: EmptyInput");
  if (!(sh > 0.0)) throw std::invalid_argument("shifted_gmean: shift must be positive");
  double log_sum = 0.0;
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("shifted_gmean: times must be non-negative");
    log_sum += std::log(t + sh);
  }
  return std::exp(log_sum / static_cast<double>(times.size())) - sh;
}

}  // namespace safeaa::bench
