#include "magnomech/tolerances.hpp"

#include <cstdlib>
#include <string>

namespace magnomech {

Tolerances Tolerances::scaled(double s) const {
  Tolerances t = *this;
  t.hypothesis *= s;
  t.equation *= s;
  t.membership *= s;
  t.symplectic *= s;
  t.invariance *= s;
  t.sigma_min *= s;
  t.agreement *= s;
  t.on_manifold *= s;
  return t;
}

Tolerances default_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("MAGNOMECH_TOL_SCALE")) {
    try {
      const double s = std::stod(env);
      if (s > 0.0) return t.scaled(s);
    } catch (const std::exception&) {
    }
  }
  return t;
}

}  // namespace magnomech
