#pragma once

// Air-to-ground line-of-sight link model: LoS probability as a function of
// elevation angle, the LoS coverage radius it implies, and the minimum QPSK
// uplink transmit power for a target bit error rate.
//
// Angles at this interface are in degrees; the LoS constants are calibrated
// for degrees. Power is linear watts unless the name says dB.

namespace uavmob::channel {

inline constexpr double kSpeedOfLight = 2.998e8;

struct ChannelParams {
  double psi = 11.95;     // LoS constant, urban
  double beta = 0.14;     // per-degree LoS constant, urban
  double f_c = 2.0e9;     // carrier frequency [Hz]
  double alpha = 2.0;     // path-loss exponent
  double eta = 5.0;       // excess path loss [dB]
  double epsilon = 0.95;  // required LoS probability
  double c = kSpeedOfLight;

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

struct LinkParams {
  double delta = 1e-8;  // target bit error rate
  double R_b = 2.0e5;   // bit rate [bit/s]
  double N_o = 1e-20;   // noise PSD [W/Hz]
  double B = 2.0e5;     // per-device bandwidth [Hz]; not used by the power law

  void validate() const;
};

/// Gaussian tail function Q(x) = P[N(0,1) > x].
double q_function(double x);

/// Inverse of q_function for p in (0, 1). Relative error is at machine
/// precision after one Halley refinement of a rational initial guess.
double q_inverse(double p);

/// Probability of LoS at elevation `theta_deg` in (0, 90].
double los_probability(double theta_deg, const ChannelParams& params);

/// Smallest elevation angle whose LoS probability reaches params.epsilon.
/// Throws InfeasibleError if epsilon exceeds the LoS probability at 90 deg.
double min_elevation_angle(const ChannelParams& params);

/// Largest slant distance at which a UAV at altitude `h` still sees the
/// device at elevation >= theta_min_deg.
double max_los_radius(double h, double theta_min_deg);

/// Elevation angle in degrees of a UAV at altitude h seen from slant distance d.
double elevation_angle(double h, double d);

/// Received power in dB(W) for transmit power `p_t_db` over slant distance d.
double received_power_db(double p_t_db, double d, const ChannelParams& params);

/// Minimum device transmit power [W] meeting link.delta over distance d.
double min_transmit_power(double d, const LinkParams& link, const ChannelParams& ch);

/// min_transmit_power(d) / d^2; every device shares it, so total power is this
/// constant times the total squared distance.
double power_per_square_meter(const LinkParams& link, const ChannelParams& ch);

}  // namespace uavmob::channel
