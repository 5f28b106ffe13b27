#include "drivesim/types.hpp"

namespace drivesim {

double normalize_angle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace drivesim
