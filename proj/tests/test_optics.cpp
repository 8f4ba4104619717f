#include "satrep/optics.hpp"

#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace satrep;
using namespace satrep::linkbudget;

namespace {

constexpr double kFirstNull = 3.8317059702075123; // first zero of J1

// Brute-force 2D grid convolution (tests/oracles) for 580 nm, 0.5 m -> 1 m,
// 1414 km, 0.5 urad.
constexpr double kGridAnchor = 0.10719462;

} // namespace

TEST(Airy, EncircledEnergyAtFirstNull) {
  const double closed = airy_encircled_energy(kFirstNull);
  EXPECT_NEAR(closed, 0.838, 1e-3);
  EXPECT_NEAR(closed, oracle::airy_energy_radial(kFirstNull), 1e-9);
}

TEST(Airy, CollectionAtFirstNullRadius) {
  const double lambda = 580e-9, tx = 0.5, z = 1500e3;
  const double r_null = 1.22 * lambda * z / tx;
  // 1.22 is rounded; compare with the exact null radius.
  const double r_exact = kFirstNull * lambda * z / (kPi * tx);
  EXPECT_NEAR(r_null, r_exact, 1e-3 * r_exact);
  EXPECT_NEAR(airy_collection_fraction(lambda, tx, 2 * r_exact, z), 0.8378, 1e-4);
}

TEST(Airy, ApertureLimits) {
  EXPECT_DOUBLE_EQ(airy_collection_fraction(580e-9, 0.5, std::numeric_limits<double>::infinity(), 1e6),
                   1.0);
  EXPECT_DOUBLE_EQ(airy_collection_fraction(580e-9, 0.5, 0.0, 1e6), 0.0);
  EXPECT_NEAR(airy_collection_fraction(580e-9, 0.5, 1e4, 1e6), 1.0, 1e-4);
}

TEST(Airy, MonotoneAndConvergesToOne) {
  double prev = 0.0;
  for (double x = 0.05; x < 200.0; x += 0.05) {
    const double e = airy_encircled_energy(x);
    EXPECT_GE(e, prev - 1e-15);
    EXPECT_LE(e, 1.0);
    prev = e;
  }
  EXPECT_GT(prev, 0.996);
}

TEST(Airy, FarFieldPreconditionNamesFresnelDistance) {
  try {
    airy_collection_fraction(580e-9, 0.5, 1.0, 100e3);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("Fresnel distance"), std::string::npos);
  }
}

TEST(Pointing, ZeroJitterEqualsAiry) {
  for (double z : {500e3, 1414e3, 3000e3}) {
    OpticalChannel ch{580e-9, 0.5, 1.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(pointing_smeared_fraction(ch, z), airy_collection_fraction(580e-9, 0.5, 1.0, z));
  }
}

TEST(Pointing, TinyJitterApproachesAiry) {
  OpticalChannel ch{580e-9, 0.5, 1.0, 1e-12, 0.0};
  EXPECT_NEAR(pointing_smeared_fraction(ch, 1414e3), airy_collection_fraction(580e-9, 0.5, 1.0, 1414e3),
              1e-6);
}

TEST(Pointing, MatchesGridOracleAtAnchor) {
  OpticalChannel ch{580e-9, 0.5, 1.0, 0.5e-6, 0.0};
  EXPECT_NEAR(pointing_smeared_fraction(ch, 1414e3), kGridAnchor, 1e-6);
}

TEST(Pointing, MonotoneDecreasingInSigmaToZero) {
  double prev = 1.0;
  for (double s : {0.0, 0.1e-6, 0.3e-6, 0.5e-6, 1e-6, 3e-6, 10e-6, 100e-6}) {
    OpticalChannel ch{580e-9, 0.5, 1.0, s, 0.0};
    const double f = pointing_smeared_fraction(ch, 1000e3);
    EXPECT_LE(f, prev + 1e-9);
    prev = f;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Pointing, LargeJitterMatchesGaussianLimit) {
  // When the wander sigma dwarfs both the beam and the receiver, the
  // collected fraction tends to r_rx^2 / (2 s^2).
  OpticalChannel ch{580e-9, 0.5, 1.0, 200e-6, 0.0};
  const double z = 1000e3, s = 200e-6 * z;
  EXPECT_NEAR(pointing_smeared_fraction(ch, z) / (0.25 / (2 * s * s)), 1.0, 0.01);
}

TEST(Pointing, NonDecreasingInReceiverAndApertures) {
  double prev = 0.0;
  for (double rx : {0.1, 0.3, 0.5, 1.0, 2.0, 4.0}) {
    OpticalChannel ch{580e-9, 0.5, rx, 0.5e-6, 0.0};
    const double f = pointing_smeared_fraction(ch, 1500e3);
    EXPECT_GE(f, prev);
    prev = f;
  }
  for (double tx : {0.2, 0.3, 0.4}) {
    OpticalChannel small{580e-9, tx, 0.6, 0.5e-6, 0.0};
    OpticalChannel big{580e-9, 2 * tx, 1.2, 0.5e-6, 0.0};
    EXPECT_GE(pointing_smeared_fraction(big, 2000e3), pointing_smeared_fraction(small, 2000e3));
  }
}

TEST(Pointing, NonIncreasingInSlantRange) {
  OpticalChannel ch{580e-9, 0.5, 1.0, 0.5e-6, 0.0};
  double prev = 1.0;
  for (double z = 500e3; z <= 5000e3; z += 250e3) {
    const double f = pointing_smeared_fraction(ch, z);
    EXPECT_LE(f, prev);
    prev = f;
  }
}

TEST(Pointing, RejectsInvalidChannel) {
  OpticalChannel ch{580e-9, 0.5, 1.0, -1e-6, 0.0};
  EXPECT_THROW(pointing_smeared_fraction(ch, 1e6), ConfigError);
  ch.pointing_sigma_rad = 0.5e-6;
  EXPECT_THROW(pointing_smeared_fraction(ch, 1e3), NumericalError);
}

TEST(Decibels, RoundTrip) {
  EXPECT_DOUBLE_EQ(loss_db(1.0), 0.0);
  EXPECT_NEAR(loss_db(1e-4), 40.0, 1e-12);
  EXPECT_NEAR(db_to_fraction(3.0103), 0.5, 1e-5);
  EXPECT_TRUE(std::isinf(loss_db(0.0)));
}
