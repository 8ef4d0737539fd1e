#pragma once

#include <cstdint>

#include "squidsim/sensing.hpp"

namespace squidsim {

// Log-distance path loss with an in-water attenuation term and log-normal
// shadowing, anchored at rssi0 for a surface link at range r0.
struct LinkParams {
  double rssi0 = -50.0;          // dBm at r0, depth 0
  double r0 = 10.0;              // m
  double alpha = 25.0;           // dB per metre of water
  double sensitivity = -120.0;   // dBm
  double shadow_sigma = 3.0;     // dB
  double p_loss_floor = 0.01;    // residual drop probability
  double telemetry_period = 2.0; // s
  double station_north = 0.0;    // ground station in the local frame, m
  double station_east = 0.0;
};

struct LinkReport {
  bool delivered = false;
  int rssi_dbm = 0;
};

/// Expected RSSI without shadowing.
double mean_rssi(const LinkParams& params, double depth, double range);

/// One transmission attempt. Always consumes exactly two draws from `rng`.
LinkReport link_transmit(const LinkParams& params, double depth, double range, Rng& rng);

/// Independent generator for Monte-Carlo trial `index`, so results do not
/// depend on how trials are distributed across threads.
Rng trial_rng(std::uint64_t seed, std::uint64_t index);

/// Fraction of `trials` delivered at fixed depth/range. Serial reference.
double delivery_rate_serial(const LinkParams& params, double depth, double range,
                            std::uint64_t trials, std::uint64_t seed);

/// OpenMP version of delivery_rate_serial; bit-identical result.
double delivery_rate_parallel(const LinkParams& params, double depth, double range,
                              std::uint64_t trials, std::uint64_t seed);

}  // namespace squidsim
