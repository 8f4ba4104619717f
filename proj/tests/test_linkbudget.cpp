#include "satrep/linkbudget.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace satrep;
using namespace satrep::linkbudget;

namespace {
const orbital::EarthModel kEarth{};
const OpticalChannel kChannel{580e-9, 0.5, 1.0, 0.5e-6, kCalibratedExcessLossDb};
} // namespace

TEST(Atmosphere, InterpolatesAndFlagsClamping) {
  const auto atm = default_atmosphere();
  const auto mid = zenith_transmittance(atm, 525e-9);
  EXPECT_NEAR(mid.value, 0.75, 1e-12);
  EXPECT_FALSE(mid.wavelength_clamped);
  const auto lo = zenith_transmittance(atm, 400e-9);
  EXPECT_DOUBLE_EQ(lo.value, 0.70);
  EXPECT_TRUE(lo.wavelength_clamped);
  const auto edge = zenith_transmittance(atm, 670e-9);
  EXPECT_DOUBLE_EQ(edge.value, 0.85);
  EXPECT_FALSE(edge.wavelength_clamped);
}

TEST(Atmosphere, AirmassScalingAndCap) {
  const auto atm = uniform_atmosphere(0.8);
  EXPECT_NEAR(atmospheric_transmittance(atm, 500e-9, kPi / 2).value, 0.8, 1e-15);
  EXPECT_NEAR(atmospheric_transmittance(atm, 500e-9, kPi / 6).value, 0.64, 1e-12);
  const double capped = atmospheric_transmittance(atm, 500e-9, deg_to_rad(10.0)).value;
  EXPECT_DOUBLE_EQ(atmospheric_transmittance(atm, 500e-9, deg_to_rad(2.0)).value, capped);
  EXPECT_THROW(atmospheric_transmittance(atm, 500e-9, 0.0), NumericalError);
}

TEST(Atmosphere, NonDecreasingInElevation) {
  const auto atm = default_atmosphere();
  double prev = 0.0;
  for (double el = 0.01; el < kPi / 2; el += 0.01) {
    const double t = atmospheric_transmittance(atm, 580e-9, el).value;
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(Atmosphere, CsvParsing) {
  std::istringstream ok("wavelength_nm,zenith_transmittance\r\n700,0.9\n500,0.6\n\n");
  const auto m = parse_atmosphere_csv(ok, "t");
  ASSERT_EQ(m.zenith.size(), 2u);
  EXPECT_DOUBLE_EQ(m.zenith[0].wavelength_m, 500e-9);
  EXPECT_DOUBLE_EQ(m.zenith[1].transmittance, 0.9);

  std::istringstream bad_header("nm,T\n500,0.5\n");
  EXPECT_THROW(parse_atmosphere_csv(bad_header), ConfigError);
  std::istringstream bad_value("wavelength_nm,zenith_transmittance\n500,abc\n");
  EXPECT_THROW(parse_atmosphere_csv(bad_value), ConfigError);
  std::istringstream out_of_range("wavelength_nm,zenith_transmittance\n500,1.5\n");
  EXPECT_THROW(parse_atmosphere_csv(out_of_range), ConfigError);
  std::istringstream dup("wavelength_nm,zenith_transmittance\n500,0.5\n500,0.6\n");
  EXPECT_THROW(parse_atmosphere_csv(dup), ConfigError);
  EXPECT_THROW(load_atmosphere_csv("/nonexistent/atm.csv"), ConfigError);
}

TEST(SinglePhoton, ProductOfFactors) {
  const auto arm = single_photon_transmission(kChannel, default_atmosphere(), {kPi / 2, 1000e3});
  EXPECT_NEAR(arm.atmosphere, 0.80, 1e-12);
  EXPECT_NEAR(arm.excess, std::pow(10.0, -0.84), 1e-12);
  EXPECT_NEAR(arm.total(), arm.diffraction * 0.80 * std::pow(10.0, -0.84), 1e-15);
  EXPECT_GT(arm.diffraction, 0.0);
  EXPECT_LT(arm.diffraction, 1.0);
}

TEST(Profile, CalibrationAnchorNearFortyDecibels) {
  const auto link = orbital::make_link(2000e3, kEarth);
  const auto lp = link_pass(link, 1000e3, orbital::Direction::counter_rotating, kChannel,
                            default_atmosphere(), kEarth);
  EXPECT_NEAR(lp.profile.peak_loss_db(), 40.0, 5.0);
  EXPECT_NEAR(lp.profile.peak_loss_db(), 39.93, 0.05);
  EXPECT_GT(loss_db(lp.profile.p0_avg), lp.profile.peak_loss_db());
  EXPECT_GT(lp.profile.flyby_time(), 300.0);
  EXPECT_LT(lp.profile.flyby_time(), 500.0);
}

TEST(Profile, PeakAtMidpointAndSymmetric) {
  const auto link = orbital::make_link(2000e3, kEarth);
  const auto lp = link_pass(link, 1000e3, orbital::Direction::counter_rotating, kChannel,
                            default_atmosphere(), kEarth, 1.0);
  const auto& s = lp.profile.samples;
  for (const auto& x : s) {
    EXPECT_LE(x.eta2, lp.profile.eta2_peak);
    EXPECT_LE(x.eta1_a, lp.profile.eta1_max);
    EXPECT_LE(x.eta1_b, lp.profile.eta1_max);
    EXPECT_DOUBLE_EQ(x.eta2, x.eta1_a * x.eta1_b);
  }
  EXPECT_NEAR(s.front().eta2, s.back().eta2, 1e-3 * s.front().eta2);
  EXPECT_LE(lp.profile.p0_avg, lp.profile.eta2_peak);
}

TEST(Profile, HalvingStepChangesAverageByLessThanOnePercent) {
  const auto link = orbital::make_link(2000e3, kEarth);
  const auto coarse = link_pass(link, 1000e3, orbital::Direction::counter_rotating, kChannel,
                                default_atmosphere(), kEarth, 10.0);
  const auto fine = link_pass(link, 1000e3, orbital::Direction::counter_rotating, kChannel,
                              default_atmosphere(), kEarth, 5.0);
  EXPECT_LT(std::abs(fine.profile.p0_avg / coarse.profile.p0_avg - 1.0), 0.01);
}

TEST(Profile, NoVisibilityThrows) {
  const auto link = orbital::make_link(5000e3, kEarth);
  EXPECT_THROW(link_pass(link, 500e3, orbital::Direction::counter_rotating, kChannel,
                         default_atmosphere(), kEarth),
               NoVisibilityError);
}

TEST(Profile, StationaryTrackSampledAtEdges) {
  const double h = orbital::geostationary_altitude(kEarth);
  const auto link = orbital::make_link(4000e3, kEarth);
  OpticalChannel ch = kChannel;
  ch.wavelength_m = 470e-9;
  const auto lp = link_pass(link, h, orbital::Direction::co_rotating, ch, default_atmosphere(), kEarth);
  EXPECT_TRUE(lp.pass.stationary);
  ASSERT_EQ(lp.profile.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(lp.profile.flyby_time(), kSecondsPerDay);
  EXPECT_DOUBLE_EQ(lp.profile.p0_avg, lp.profile.samples.front().eta2);
}

TEST(Integrate, TrapezoidExactForLinear) {
  std::vector<ProfileSample> s;
  for (int i = 0; i <= 10; ++i) s.push_back({i * 2.0, 0, 0, 1.0 + 0.5 * i});
  EXPECT_NEAR(integrate_eta2(s), 20.0 * 1.0 + 0.5 * 0.5 * 10 * 20.0, 1e-12);
}

TEST(Fiber, LossAndTransmission) {
  EXPECT_DOUBLE_EQ(fiber_loss_db(2000e3), 300.0);
  EXPECT_NEAR(fiber_transmission(20e3), 0.5011872336272722, 1e-15);
  EXPECT_THROW(fiber_loss_db(-1.0), ConfigError);
}
