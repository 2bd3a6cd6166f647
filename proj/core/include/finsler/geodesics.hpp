#pragma once

#include "finsler/spray.hpp"
#include "finsler/tensor.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace finsler {

/// Samples of one integrated geodesic. All sequences have the same length
/// and `times` is strictly increasing.
struct GeodesicTrace {
  std::vector<double> times;
  std::vector<Vector> points;
  std::vector<Vector> velocities;
  std::vector<double> K_values;  // empty when no monitor was given
  double max_K_drift = 0.0;      // max |K(t) - K(0)| / K(0)
  bool truncated = false;
  std::string truncation_reason;

  std::size_t size() const noexcept { return times.size(); }
};

/// K(x, y) evaluator used to monitor conservation along the trajectory.
using KMonitor = std::function<double(const Vector& x, const Vector& y)>;

/// Classical RK4 on x' = y, y' = -G(x, y) from t = 0 to t_end with a fixed
/// step (the last step is shortened to land on t_end).
/// A NearCollinearError from the spray or the monitor truncates the trace;
/// a non-finite state throws IntegrationError.
GeodesicTrace integrate_geodesic(const SprayFunction& spray, const Vector& x0, const Vector& y0,
                                 double t_end, double step,
                                 const std::optional<KMonitor>& monitor = std::nullopt);

/// Finsleroid K at (x, y) on the given background.
KMonitor finsleroid_monitor(const BackgroundSpace& space, const Charge& charge);

/// CSV with header t,x1..xN,y1..yN,K (K column empty without a monitor).
void write_trace_csv(std::ostream& os, const GeodesicTrace& trace);

}  // namespace finsler
