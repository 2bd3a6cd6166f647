#include "finsler/geodesics.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace finsler {

namespace {

struct State {
  Vector x;
  Vector y;
};

bool finite(const State& s) { return s.x.allFinite() && s.y.allFinite(); }

State rk4_step(const SprayFunction& spray, const State& s, double h) {
  auto rhs = [&](const Vector& x, const Vector& y) { return State{y, -spray(x, y)}; };
  const State k1 = rhs(s.x, s.y);
  const State k2 = rhs(s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y);
  const State k3 = rhs(s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y);
  const State k4 = rhs(s.x + h * k3.x, s.y + h * k3.y);
  return {s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

}  // namespace

GeodesicTrace integrate_geodesic(const SprayFunction& spray, const Vector& x0, const Vector& y0,
                                 double t_end, double step,
                                 const std::optional<KMonitor>& monitor) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("integrate_geodesic: step must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw DomainError("integrate_geodesic: t_end must be > 0");
  if (x0.size() != y0.size()) throw DomainError("integrate_geodesic: x0 and y0 differ in size");
  if (y0.norm() == 0.0) throw DomainError("integrate_geodesic: y0 = 0");

  GeodesicTrace trace;
  State s{x0, y0};
  double K0 = 0.0;

  auto record = [&](double t, const State& st) {
    double K = 0.0;
    if (monitor) {
      K = (*monitor)(st.x, st.y);
      if (!std::isfinite(K)) throw IntegrationError("integrate_geodesic: monitor returned non-finite K");
    }
    trace.times.push_back(t);
    trace.points.push_back(st.x);
    trace.velocities.push_back(st.y);
    if (monitor) {
      if (trace.K_values.empty()) K0 = K;
      trace.K_values.push_back(K);
      trace.max_K_drift = std::max(trace.max_K_drift, std::abs(K - K0) / K0);
    }
  };

  try {
    record(0.0, s);
  } catch (const NearCollinearError& e) {
    throw DomainError(std::string("integrate_geodesic: initial velocity is singular: ") + e.what());
  }

  const auto n_steps = static_cast<long>(std::ceil(t_end / step - 1e-9));
  for (long i = 1; i <= n_steps; ++i) {
    const double t_prev = trace.times.back();
    const double t = (i == n_steps) ? t_end : static_cast<double>(i) * step;
    State next;
    try {
      next = rk4_step(spray, s, t - t_prev);
      if (!finite(next)) {
        std::ostringstream os;
        os << "integrate_geodesic: non-finite state at t = " << t;
        throw IntegrationError(os.str());
      }
      record(t, next);
    } catch (const NearCollinearError& e) {
      trace.truncated = true;
      std::ostringstream os;
      os << "y became collinear with b near t = " << t_prev << " (" << e.what() << ")";
      trace.truncation_reason = os.str();
      break;
    }
    s = next;
  }
  return trace;
}

KMonitor finsleroid_monitor(const BackgroundSpace& space, const Charge& charge) {
  return [space, charge](const Vector& x, const Vector& y) {
    const Frame f = frame_at(space, x, y);
    f.require_regular("finsleroid_monitor");
    return evaluate_K(charge, f).K;
  };
}

void write_trace_csv(std::ostream& os, const GeodesicTrace& trace) {
  const std::size_t n = trace.points.empty() ? 0 : static_cast<std::size_t>(trace.points[0].size());
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",y" << i;
  os << ",K\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < trace.size(); ++r) {
    os << trace.times[r];
    for (std::size_t i = 0; i < n; ++i) os << ',' << trace.points[r](static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n; ++i) os << ',' << trace.velocities[r](static_cast<Eigen::Index>(i));
    os << ',';
    if (r < trace.K_values.size()) os << trace.K_values[r];
    os << '\n';
  }
}

}  // namespace finsler
