#pragma once

#include "loadmask/env/episode.hpp"

namespace loadmask::metrics {

/// Money figures for one simulated day, GBP.
struct CostReport {
  double battery_cost = 0.0;      // sum(delta_b * price); charging positive
  double bill = 0.0;              // sum(masked * dt * price)
  double remaining_pct = 0.0;     // 100 * B_final / b_max
  double battery_final = 0.0;     // kWh
  double compensated_cost = 0.0;  // battery_cost + (b_max - B_final) * peak_price
};

/// battery_cost plus the cost of topping the battery back up to b_max at the peak price.
double compensated_cost(double battery_cost, double battery_final, double b_max, double peak_price);

CostReport cost_report(const env::EpisodeTrace& trace, const env::TariffSchedule& tariff,
                       const env::BatteryConfig& battery);

}  // namespace loadmask::metrics
