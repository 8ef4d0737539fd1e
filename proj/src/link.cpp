#include "squidsim/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace squidsim {

double mean_rssi(const LinkParams& P, double depth, double range)
{
  if (depth < 0.0 || range < 0.0) throw std::invalid_argument("link depth and range must be >= 0");
  return P.rssi0 - 20.0 * std::log10(std::max(range, 1.0) / P.r0) - P.alpha * depth;
}

LinkReport link_transmit(const LinkParams& P, double depth, double range, Rng& rng)
{
  std::normal_distribution<double> shadow(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double fade = shadow(rng) * P.shadow_sigma;
  const double u = uniform(rng);

  const double rssi = std::min(0.0, mean_rssi(P, depth, range) + fade);
  LinkReport rep;
  rep.rssi_dbm = static_cast<int>(std::lround(rssi));
  rep.delivered = rssi >= P.sensitivity && u >= P.p_loss_floor;
  return rep;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t index)
{
  // splitmix64 over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return Rng(z);
}

double delivery_rate_serial(const LinkParams& P, double depth, double range, std::uint64_t trials,
                            std::uint64_t seed)
{
  if (trials == 0) return 0.0;
  std::uint64_t delivered = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Rng rng = trial_rng(seed, i);
    if (link_transmit(P, depth, range, rng).delivered) ++delivered;
  }
  return static_cast<double>(delivered) / static_cast<double>(trials);
}

double delivery_rate_parallel(const LinkParams& P, double depth, double range,
                              std::uint64_t trials, std::uint64_t seed)
{
  if (trials == 0) return 0.0;
  const auto n = static_cast<long long>(trials);
  long long delivered = 0;
#pragma omp parallel for reduction(+ : delivered) schedule(static)
  for (long long i = 0; i < n; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i));
    if (link_transmit(P, depth, range, rng).delivered) ++delivered;
  }
  return static_cast<double>(delivered) / static_cast<double>(trials);
}

}  // namespace squidsim
