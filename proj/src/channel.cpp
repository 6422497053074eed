#include "vanet/channel.hpp"

#include "vanet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace vanet {

std::string_view to_string(InterferenceModel m) {
  return m == InterferenceModel::same_slot ? "same_slot" : "all_vehicles";
}

InterferenceModel parse_interference_model(std::string_view name) {
  if (name == "same_slot") return InterferenceModel::same_slot;
  if (name == "all_vehicles") return InterferenceModel::all_vehicles;
  throw std::invalid_argument("unknown interference model '" + std::string(name) +
                              "' (valid: same_slot, all_vehicles)");
}

void validate(const ChannelParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("channel.") + name + " must be > 0");
  };
  positive(p.carrier_hz, "carrier_hz");
  positive(p.reference_distance_m, "reference_distance_m");
  positive(p.path_loss_exponent, "path_loss_exponent");
  positive(p.antenna_gain, "antenna_gain");
  positive(p.system_loss, "system_loss");
  positive(p.doppler_threshold_hz, "doppler_threshold_hz");
  positive(p.bandwidth_hz, "bandwidth_hz");
  positive(p.boltzmann, "boltzmann");
  positive(p.min_distance_m, "min_distance_m");
  if (!(p.shadow_sigma_db >= 0.0)) throw std::invalid_argument("channel.shadow_sigma_db must be >= 0");
  if (!(p.temperature_k >= 0.0)) throw std::invalid_argument("channel.temperature_k must be >= 0");
}

double path_loss_db(double distance_m, const ChannelParams& p) {
  if (!(distance_m > 0.0)) throw DomainError("path_loss_db: distance must be > 0");
  const double decades = std::log10(distance_m / p.reference_distance_m);
  return 20.0 * decades + 10.0 * p.path_loss_exponent * decades + 20.0 * std::log10(p.carrier_hz / 1e9);
}

double doppler_factor(double relative_speed_mps, const ChannelParams& p) {
  const double shift = std::abs(relative_speed_mps) * p.carrier_hz / speed_of_light;
  return std::exp(-std::min(shift / p.doppler_threshold_hz, 10.0));
}

double received_power(double transmit_w, double distance_m, double relative_speed_mps, double shadow_db,
                      const ChannelParams& p) {
  const double attenuation = std::pow(10.0, -path_loss_db(distance_m, p) / 10.0);
  const double shadow = std::pow(10.0, shadow_db / 10.0);
  return transmit_w * attenuation * shadow * p.antenna_gain * doppler_factor(relative_speed_mps, p) / p.system_loss;
}

double thermal_noise(const ChannelParams& p) { return p.boltzmann * p.temperature_k * p.bandwidth_hz; }

double ShadowSampler::sample_db(VehicleId tx, VehicleId rx) const {
  if (sigma_db_ == 0.0) return 0.0;
  std::mt19937_64 engine(derive_seed(run_seed_, {static_cast<std::uint64_t>(StreamRole::shadowing),
                                                 static_cast<std::uint64_t>(second_), static_cast<std::uint64_t>(tx),
                                                 static_cast<std::uint64_t>(rx)}));
  return std::normal_distribution<double>(0.0, sigma_db_)(engine);
}

namespace {

double link_power(const Snapshot& s, std::size_t tx, std::size_t rx, double transmit_w, const ChannelParams& p,
                  const ShadowSampler& shadow) {
  const auto& a = s.vehicles[tx];
  const auto& b = s.vehicles[rx];
  const double d = std::max(distance(a, b), p.min_distance_m);
  return received_power(transmit_w, d, relative_speed(a, b), shadow.sample_db(a.id, b.id), p);
}

}  // namespace

double sinr(const Snapshot& snapshot, std::size_t tx, std::size_t rx, std::span<const double> transmit_w,
            const ChannelParams& p, const ShadowSampler& shadow) {
  if (tx == rx) throw DomainError("sinr: transmitter and receiver must differ");
  const double signal = link_power(snapshot, tx, rx, transmit_w[tx], p, shadow);
  double interference = 0.0;
  for (std::size_t k = 0; k < snapshot.size(); ++k) {
    if (k == tx || k == rx) continue;
    interference += link_power(snapshot, k, rx, transmit_w[k], p, shadow);
  }
  return signal / (interference + thermal_noise(p));
}

LinkBudget::LinkBudget(const Snapshot& snapshot, const ChannelParams& p, const ShadowSampler& shadow)
    : n_(snapshot.size()), noise_w_(thermal_noise(p)), gain_(n_ * n_, 0.0) {
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      if (a == b) continue;
      const auto& va = snapshot.vehicles[a];
      const auto& vb = snapshot.vehicles[b];
      gain_[a * n_ + b] = received_power(1.0, std::max(distance(va, vb), p.min_distance_m), relative_speed(va, vb),
                                         shadow.sample_db(va.id, vb.id), p);
    }
  }
}

std::vector<double> LinkBudget::total_received(std::span<const double> transmit_w) const {
  std::vector<double> total(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    const double pk = transmit_w[k];
    const double* row = &gain_[k * n_];
    for (std::size_t j = 0; j < n_; ++j)
      if (j != k) total[j] += pk * row[j];
  }
  return total;
}

}  // namespace vanet
