#include "uavmob/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uavmob/errors.hpp"
#include "uavmob/geometry.hpp"

namespace uavmob::channel {
namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string(field) + " must satisfy " + rule);
}

// Acklam's rational approximation of the standard normal quantile,
// |relative error| < 1.15e-9 before refinement.
double normal_quantile_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

void ChannelParams::validate() const {
  require(psi > 0.0, "psi", "> 0");
  require(beta > 0.0, "beta", "> 0");
  require(f_c > 0.0, "f_c", "> 0");
  require(alpha > 0.0, "alpha", "> 0");
  require(std::isfinite(eta), "eta", "finite");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "0 < epsilon < 1");
  require(c > 0.0, "c", "> 0");
}

void LinkParams::validate() const {
  require(delta > 0.0 && delta <= 0.5, "delta", "0 < delta <= 0.5");
  require(R_b > 0.0, "R_b", "> 0");
  require(N_o > 0.0, "N_o", "> 0");
  require(B > 0.0, "B", "> 0");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inverse: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  // Work with the lower-tail quantile x = Phi^-1(p); Q^-1(p) = -x.
  double x = normal_quantile_guess(p);
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return -x;
}

double los_probability(double theta_deg, const ChannelParams& params) {
  if (!(theta_deg > 0.0 && theta_deg <= 90.0)) {
    throw std::domain_error("los_probability: elevation must lie in (0, 90] degrees");
  }
  return 1.0 / (1.0 + params.psi * std::exp(-params.beta * (theta_deg - params.psi)));
}

double min_elevation_angle(const ChannelParams& params) {
  const double ceiling = los_probability(90.0, params);
  if (params.epsilon >= ceiling) {
    throw InfeasibleError("min_elevation_angle: LoS threshold " + std::to_string(params.epsilon) +
                          " exceeds the LoS probability at 90 degrees (" +
                          std::to_string(ceiling) + ")");
  }
  const double eps = params.epsilon;
  const double theta = params.psi - std::log((1.0 - eps) / (eps * params.psi)) / params.beta;
  // Small thresholds put the angle below the horizon; any elevation then works.
  if (theta <= 0.0) {
    throw std::domain_error("min_elevation_angle: threshold is met below 0 degrees");
  }
  return theta;
}

double max_los_radius(double h, double theta_min_deg) {
  if (!(h >= 0.0)) throw std::domain_error("max_los_radius: altitude must be >= 0");
  if (!(theta_min_deg > 0.0 && theta_min_deg <= 90.0)) {
    throw std::domain_error("max_los_radius: theta_min must lie in (0, 90] degrees");
  }
  return h / std::sin(deg_to_rad(theta_min_deg));
}

double elevation_angle(double h, double d) {
  if (!(d > 0.0) || h < 0.0 || h > d) throw std::domain_error("elevation_angle: need 0 <= h <= d, d > 0");
  return rad_to_deg(std::asin(h / d));
}

double received_power_db(double p_t_db, double d, const ChannelParams& params) {
  if (!(d > 0.0)) throw std::domain_error("received_power_db: distance must be > 0");
  return p_t_db - 10.0 * params.alpha * std::log10(4.0 * kPi * params.f_c * d / params.c) -
         params.eta;
}

double power_per_square_meter(const LinkParams& link, const ChannelParams& ch) {
  if (!(link.delta > 0.0 && link.delta <= 0.5)) {
    throw std::domain_error("min_transmit_power: delta must lie in (0, 0.5]");
  }
  const double qi = q_inverse(link.delta);
  const double k = 4.0 * kPi * ch.f_c / ch.c;
  return qi * qi * (link.R_b * link.N_o / 2.0) * std::pow(10.0, ch.eta / 10.0) * k * k;
}

double min_transmit_power(double d, const LinkParams& link, const ChannelParams& ch) {
  if (!(d > 0.0)) throw std::domain_error("min_transmit_power: distance must be > 0");
  return power_per_square_meter(link, ch) * d * d;
}

}  // namespace uavmob::channel
