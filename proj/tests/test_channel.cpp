#include "support.hpp"
#include "vanet/channel.hpp"

#include <doctest.h>

#include <cmath>

using namespace vanet;

TEST_SUITE("channel") {

TEST_CASE("path loss") {
  ChannelParams p;
  CHECK(path_loss_db(1.0, p) == doctest::Approx(20 * std::log10(5.9)).epsilon(1e-12));
  CHECK(path_loss_db(1.0, p) == doctest::Approx(15.417).epsilon(1e-4));
  CHECK(std::abs(path_loss_db(100.0, p) - 105.417) < 1e-3);
  CHECK(path_loss_db(100.0, p) - path_loss_db(10.0, p) == doctest::Approx(45.0).epsilon(1e-12));
  CHECK_THROWS_AS(path_loss_db(0.0, p), DomainError);
  CHECK_THROWS_AS(path_loss_db(-3.0, p), DomainError);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(0.1, 1000.0);
    REQUIRE(path_loss_db(d, p) == doctest::Approx(ref::path_loss_db(d, 5.9e9, 1.0, 2.5)).epsilon(1e-12));
  }
}

TEST_CASE("doppler factor") {
  ChannelParams p;
  CHECK(doppler_factor(0.0, p) == 1.0);
  CHECK(std::abs(doppler_factor(30.0, p) - 0.5541) < 1e-4);
  CHECK(doppler_factor(30.0, p) == doctest::Approx(std::exp(-30.0 * 5.9e9 / 2.998e8 / 1000.0)).epsilon(1e-12));
  CHECK(doppler_factor(1e6, p) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
  CHECK(doppler_factor(-30.0, p) == doppler_factor(30.0, p));
}

TEST_CASE("received power") {
  ChannelParams p;
  CHECK(received_power(10.0, 100.0, 0.0, 0.0, p) == doctest::Approx(5.746e-10).epsilon(1e-3));
  CHECK(received_power(10.0, 100.0, 0.0, 3.0, p) / received_power(10.0, 100.0, 0.0, 0.0, p) ==
        doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-12));
  ChannelParams unit = p;
  unit.antenna_gain = 1.0;
  CHECK(received_power(1.0, 1.0, 0.0, 0.0, unit) == doctest::Approx(0.0287).epsilon(2e-3));
  CHECK(received_power(1.0, 1.0, 0.0, 0.0, unit) == doctest::Approx(std::pow(10.0, -1.5417)).epsilon(1e-4));
}

TEST_CASE("received power strictly decreases with distance") {
  ChannelParams p;
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = rng.uniform(1.0, 500.0);
    const double d2 = d1 + rng.uniform(1e-3, 100.0);
    const double v = rng.uniform(0.0, 60.0);
    REQUIRE(received_power(1.0, d2, v, 0.0, p) < received_power(1.0, d1, v, 0.0, p));
  }
}

TEST_CASE("thermal noise") {
  ChannelParams p;
  CHECK(thermal_noise(p) == doctest::Approx(4.0039e-14).epsilon(1e-4));
  ChannelParams wide = p;
  wide.bandwidth_hz *= 2;
  CHECK(thermal_noise(wide) == doctest::Approx(2 * thermal_noise(p)).epsilon(1e-15));
  ChannelParams cold = p;
  cold.temperature_k = 0;
  CHECK(thermal_noise(cold) == 0.0);
}

static Snapshot line(std::initializer_list<double> xs) {
  Snapshot s;
  VehicleId id = 1;
  for (double x : xs) s.vehicles.push_back({id++, x, 0.0, 0.0, 0.0});
  return s;
}

TEST_CASE("sinr without interferers") {
  ChannelParams p;
  const auto s = line({0.0, 100.0});
  const std::vector<double> w{10.0, 10.0};
  const double v = sinr(s, 0, 1, w, p, ShadowSampler::disabled());
  CHECK(v == doctest::Approx(5.746e-10 / 4.0039e-14).epsilon(1e-3));
  CHECK(v == doctest::Approx(14351).epsilon(1e-3));
  CHECK_THROWS_AS(sinr(s, 1, 1, w, p, ShadowSampler::disabled()), DomainError);
}

TEST_CASE("an interferer matching the signal pushes sinr below 1") {
  ChannelParams p;
  const auto s = line({-100.0, 0.0, 100.0});
  const std::vector<double> w{10.0, 10.0, 10.0};
  CHECK(sinr(s, 0, 1, w, p, ShadowSampler::disabled()) < 1.0);
}

TEST_CASE("sinr strictly decreases as interferer power grows") {
  ChannelParams p;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto s = ref::random_snapshot(rng, 3 + rng.index(5));
    std::vector<double> w(s.size());
    for (auto& x : w) x = rng.uniform(1.0, 100.0);
    const ShadowSampler shadow(9, 1, 4.0);
    const double before = sinr(s, 0, 1, w, p, shadow);
    const std::size_t k = 2 + rng.index(s.size() - 2);
    w[k] *= 1.5;
    REQUIRE(sinr(s, 0, 1, w, p, shadow) < before);
  }
}

TEST_CASE("dB and linear sinr threshold checks agree") {
  ChannelParams p;
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const auto s = ref::random_snapshot(rng, 2 + rng.index(4));
    std::vector<double> w(s.size(), 10.0);
    const double v = sinr(s, 0, 1, w, p, ShadowSampler::disabled());
    const double th_db = rng.uniform(-10.0, 60.0);
    const double th = std::pow(10.0, th_db / 10.0);
    if (std::abs(v - th) <= 1e-9 * th) continue;
    REQUIRE((10 * std::log10(v) >= th_db) == (v >= th));
  }
}

TEST_CASE("shadowing draws") {
  const ShadowSampler s(42, 7, 4.0);
  CHECK(s.sample_db(1, 2) == s.sample_db(1, 2));
  CHECK(s.sample_db(1, 2) != s.sample_db(2, 1));
  CHECK(ShadowSampler(42, 8, 4.0).sample_db(1, 2) != s.sample_db(1, 2));
  CHECK(ShadowSampler::disabled().sample_db(1, 2) == 0.0);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = s.sample_db(i, i + 1);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(sd - 4.0) < 0.05 * 4.0);
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("link budget matches the reference gain") {
  ChannelParams p;
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto s = ref::random_snapshot(rng, 2 + rng.index(6));
    const LinkBudget b(s, p, ShadowSampler::disabled());
    const auto a = rng.index(s.size());
    auto c = rng.index(s.size());
    if (a == c) c = (c + 1) % s.size();
    REQUIRE(b.gain(a, c) == doctest::Approx(ref::gain(s.vehicles[a], s.vehicles[c], p)).epsilon(1e-12));
    REQUIRE(b.received(a, c, 3.0) == doctest::Approx(3.0 * b.gain(a, c)).epsilon(1e-15));
  }
}

TEST_CASE("coincident vehicles are clamped to the minimum distance") {
  ChannelParams p;
  const auto s = line({50.0, 50.0});
  const LinkBudget b(s, p, ShadowSampler::disabled());
  CHECK(std::isfinite(b.gain(0, 1)));
  CHECK(b.gain(0, 1) == doctest::Approx(received_power(1.0, 2.0, 0.0, 0.0, p)).epsilon(1e-12));
}

TEST_CASE("interference model names") {
  CHECK(parse_interference_model("all_vehicles") == InterferenceModel::all_vehicles);
  CHECK(to_string(InterferenceModel::same_slot) == "same_slot");
  CHECK_THROWS_AS(parse_interference_model("nearest"), std::invalid_argument);
}

}
