#pragma once

namespace magnomech {

struct Tolerances {
  double hypothesis = 1e-8;
  double equation = 1e-7;
  double band_factor = 10.0;
  double membership = 1e-8;
  double symplectic = 1e-8;
  double invariance = 1e-10;
  double sigma_min = 1e-8;
  double fd_step = 1e-5;
  double agreement = 1e-9;
  double on_manifold = 1e-8;

  // Every threshold multiplied by s; fd_step and band_factor are left alone.
  Tolerances scaled(double s) const;
};

// Defaults scaled by MAGNOMECH_TOL_SCALE when that variable holds a positive number.
Tolerances default_tolerances();

}  // namespace magnomech
