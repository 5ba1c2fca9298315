#include "loadmask/metrics/cost.hpp"

#include "loadmask/core/error.hpp"

namespace loadmask::metrics {

double compensated_cost(double battery_cost, double battery_final, double b_max, double peak_price) {
  return battery_cost + (b_max - battery_final) * peak_price;
}

CostReport cost_report(const env::EpisodeTrace& trace, const env::TariffSchedule& tariff,
                       const env::BatteryConfig& battery) {
  if (trace.empty()) throw ValidationError("cost_report: empty trace");
  CostReport r;
  for (const auto& row : trace) {
    r.battery_cost += row.delta_b * row.price;
    r.bill += row.masked * battery.dt_hours * row.price;
  }
  r.battery_final = trace.back().battery_next;
  r.remaining_pct = 100.0 * r.battery_final / battery.b_max;
  r.compensated_cost = compensated_cost(r.battery_cost, r.battery_final, battery.b_max, tariff.peak_price);
  return r;
}

}  // namespace loadmask::metrics
