#include "magnomech/sampling.hpp"

#include <boost/random/sobol.hpp>

#include "magnomech/errors.hpp"

namespace magnomech {

Box Box::uniform(Index n, double lo, double hi) {
  Box b;
  b.bounds.resize(n, 2);
  b.bounds.col(0).setConstant(lo);
  b.bounds.col(1).setConstant(hi);
  return b;
}

std::vector<Vec> sobol_points(const Box& box, int count, std::uint64_t seed) {
  const Index d = box.dim();
  if (d < 1) throw InvalidArgument("sampling box has no coordinates");
  boost::random::sobol engine(static_cast<std::size_t>(d));
  engine.discard(static_cast<std::uintmax_t>(d) * (1 + seed));
  const double scale = 1.0 / (static_cast<double>(engine.max()) + 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Vec x(d);
    for (Index i = 0; i < d; ++i) {
      const double u = static_cast<double>(engine()) * scale;
      x(i) = box.bounds(i, 0) + u * (box.bounds(i, 1) - box.bounds(i, 0));
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<ConfigPoint> config_samples(const Box& q_box, int count, std::uint64_t seed) {
  std::vector<ConfigPoint> out;
  for (Vec& x : sobol_points(q_box, count, seed)) out.emplace_back(std::move(x));
  return out;
}

std::vector<PhasePoint> phase_samples(const NonholonomicSystem& sys, const Box& q_box,
                                      const Box& p_box, int count, std::uint64_t seed) {
  const Index n = q_box.dim();
  Box joint;
  joint.bounds.resize(2 * n, 2);
  joint.bounds << q_box.bounds, p_box.bounds;
  std::vector<PhasePoint> out;
  for (const Vec& x : sobol_points(joint, count, seed)) {
    out.push_back(project_to_M(sys, PhasePoint(x.head(n), x.tail(n))));
  }
  return out;
}

}  // namespace magnomech
