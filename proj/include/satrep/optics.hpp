#pragma once

// Far-field diffraction of a uniformly illuminated circular transmitter and
// its average over Gaussian pointing jitter.

#include "satrep/constants.hpp"
#include "satrep/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace satrep::linkbudget {

/// Fixed per-arm loss of the shipped channel presets (optics, coupling and
/// everything the zenith table does not cover). Calibrated together with
/// default_atmosphere().
inline constexpr double kCalibratedExcessLossDb = 8.4;

struct OpticalChannel {
  double wavelength_m = 580e-9;
  double tx_aperture_m = 0.5;
  double rx_aperture_m = 1.0;
  double pointing_sigma_rad = 0.5e-6;
  double excess_loss_db = 0.0;

  void validate() const {
    if (!(wavelength_m > 0.0) || !(tx_aperture_m > 0.0) || !(rx_aperture_m > 0.0)) {
      throw ConfigError("OpticalChannel: wavelength and apertures must be positive");
    }
    if (!(pointing_sigma_rad >= 0.0)) {
      throw ConfigError("OpticalChannel: pointing_sigma_rad must be >= 0");
    }
    if (!(excess_loss_db >= 0.0)) {
      throw ConfigError("OpticalChannel: excess_loss_db must be >= 0");
    }
  }
};

/// loss_db = -10 log10(fraction); +inf for a zero fraction.
inline double loss_db(double fraction) { return -10.0 * std::log10(fraction); }

inline double db_to_fraction(double loss) { return std::pow(10.0, -loss / 10.0); }

/// Distance D^2 / lambda beyond which the transmitter is treated in the far field.
inline double fresnel_distance(double tx_d, double lambda) { return tx_d * tx_d / lambda; }

/// Power fraction of an Airy pattern inside normalised radius x:
/// E(x) = 1 - J0(x)^2 - J1(x)^2.
inline double airy_encircled_energy(double x) {
  if (x <= 0.0) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  const double j0 = std::cyl_bessel_j(0.0, x);
  const double j1 = std::cyl_bessel_j(1.0, x);
  return std::clamp(1.0 - j0 * j0 - j1 * j1, 0.0, 1.0);
}

namespace detail {

inline void require_far_field(double lambda, double tx_d, double slant) {
  const double fresnel = fresnel_distance(tx_d, lambda);
  if (!(slant >= fresnel)) {
    std::ostringstream os;
    os << "far-field condition violated: slant range " << slant
       << " m is shorter than the Fresnel distance D^2/lambda = " << fresnel << " m";
    throw NumericalError(os.str());
  }
}

// Radial scale factor: x = k * rho for a receiver-plane radius rho.
inline double airy_scale(double lambda, double tx_d, double slant) {
  return kPi * tx_d / (lambda * slant);
}

// I1(z) * exp(-z), stable for large z.
inline double bessel_i1_scaled(double z) {
  if (z <= 0.0) return 0.0;
  if (z < 600.0) return std::cyl_bessel_i(1.0, z) * std::exp(-z);
  // Hankel asymptotic series, mu = 4 nu^2 = 4.
  const double mu = 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * z);
    sum += term;
  }
  return sum / std::sqrt(kTwoPi * z);
}

} // namespace detail

inline double airy_collection_fraction(double lambda, double tx_d, double rx_d, double slant) {
  detail::require_far_field(lambda, tx_d, slant);
  if (rx_d <= 0.0) return 0.0;
  return airy_encircled_energy(detail::airy_scale(lambda, tx_d, slant) * 0.5 * rx_d);
}

/// Absolute tolerance of the pointing-jitter quadrature.
inline constexpr double kPointingQuadratureTolerance = 1e-6;

/// Mean collected fraction when the far-field pattern wanders over the
/// receiver with a circular Gaussian of spatial sigma s = sigma_rad * slant.
///
/// With R the receiver radius and E the Airy encircled energy, the average
/// is the 1D integral
///
///   f = int_0^inf E(k rho) (R / s^2) exp(-(rho^2 + R^2) / 2 s^2) I1(rho R / s^2) drho,
///
/// obtained by integrating the Rician capture probability by parts. The
/// kernel is smooth and concentrated within 12 s of R.
inline double pointing_smeared_fraction(const OpticalChannel& ch, double slant) {
  ch.validate();
  detail::require_far_field(ch.wavelength_m, ch.tx_aperture_m, slant);
  const double s = ch.pointing_sigma_rad * slant;
  const double r_rx = 0.5 * ch.rx_aperture_m;
  const double k = detail::airy_scale(ch.wavelength_m, ch.tx_aperture_m, slant);
  if (s == 0.0) return airy_encircled_energy(k * r_rx);
  if (!std::isfinite(r_rx)) return 1.0;

  // Integrate in u = (rho - R) / s so the abscissae stay O(1) however small
  // the jitter is.
  const double a = r_rx / s;
  auto integrand = [&](double u) {
    const double rho = r_rx + s * u;
    const double kernel = a * std::exp(-0.5 * u * u) * detail::bessel_i1_scaled(a * (a + u));
    return airy_encircled_energy(k * rho) * kernel;
  };

  const double lo = std::max(-a, -12.0);
  const double hi = 12.0;
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, lo, hi, 20, 1e-12, &err);
  if (!(err <= kPointingQuadratureTolerance) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "pointing quadrature did not converge: residual " << err << " exceeds "
       << kPointingQuadratureTolerance;
    throw NumericalError(os.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

} // namespace satrep::linkbudget
