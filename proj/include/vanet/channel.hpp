#pragma once

#include "vanet/trajectory.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <stdexcept>
#include <vector>

namespace vanet {

inline constexpr double speed_of_light = 2.998e8;

// Who interferes with a hop. all_vehicles: every other vehicle in the snapshot at its own
// power. same_slot: only nodes transmitting in the same relay slot index; hop h of every
// path shares slot h.
enum class InterferenceModel { same_slot, all_vehicles };

std::string_view to_string(InterferenceModel m);
InterferenceModel parse_interference_model(std::string_view name);

struct ChannelParams {
  double carrier_hz = 5.9e9;
  double reference_distance_m = 1.0;
  double path_loss_exponent = 2.5;
  double antenna_gain = 2.0;  // linear
  double system_loss = 1.0;   // linear
  double shadow_sigma_db = 4.0;
  double doppler_threshold_hz = 1000.0;
  double temperature_k = 290.0;
  double bandwidth_hz = 1e7;
  double boltzmann = 1.380649e-23;
  // Link distances are clamped to this before evaluating path loss.
  double min_distance_m = 2.0;
  InterferenceModel interference = InterferenceModel::same_slot;
};

void validate(const ChannelParams& p);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Log-distance path loss with a carrier-frequency term, in dB. Throws DomainError for d <= 0.
double path_loss_db(double distance_m, const ChannelParams& p);

// exp(-min(|df|/f_th, 10)) with df = |v_rel| * f_c / c.
double doppler_factor(double relative_speed_mps, const ChannelParams& p);

// Linear received power; the dB path loss is applied as an attenuation 10^(-PL/10).
double received_power(double transmit_w, double distance_m, double relative_speed_mps, double shadow_db,
                      const ChannelParams& p);

double thermal_noise(const ChannelParams& p);

// Zero-mean Gaussian shadowing in dB, one draw per directed link per second.
// Each draw is a pure function of (seed, second, tx, rx).
class ShadowSampler {
 public:
  ShadowSampler() = default;
  ShadowSampler(std::uint64_t run_seed, int second, double sigma_db)
      : run_seed_(run_seed), second_(second), sigma_db_(sigma_db) {}

  static ShadowSampler disabled() { return ShadowSampler(0, 0, 0.0); }

  double sample_db(VehicleId tx, VehicleId rx) const;
  double sigma_db() const { return sigma_db_; }

 private:
  std::uint64_t run_seed_ = 0;
  int second_ = 0;
  double sigma_db_ = 0.0;
};

// Direct SINR at snapshot vehicle `rx` for a transmission from `tx`. Every other
// vehicle k interferes with power transmit_w[k]. Throws DomainError when tx == rx.
double sinr(const Snapshot& snapshot, std::size_t tx, std::size_t rx, std::span<const double> transmit_w,
            const ChannelParams& p, const ShadowSampler& shadow);

// Per-second precomputation of every directed link's power gain: all factors of
// the received power except the transmit power.
class LinkBudget {
 public:
  LinkBudget(const Snapshot& snapshot, const ChannelParams& p, const ShadowSampler& shadow);

  std::size_t size() const { return n_; }
  double gain(std::size_t tx, std::size_t rx) const { return gain_[tx * n_ + rx]; }
  double noise_w() const { return noise_w_; }

  double received(std::size_t tx, std::size_t rx, double transmit_w) const { return transmit_w * gain(tx, rx); }

  // Sum over every vehicle k != rx of transmit_w[k] * gain(k, rx).
  std::vector<double> total_received(std::span<const double> transmit_w) const;

 private:
  std::size_t n_;
  double noise_w_;
  std::vector<double> gain_;
};

}  // namespace vanet
