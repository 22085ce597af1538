#include "pinn/geometry.hpp"

#include "pinn/errors.hpp"

namespace pinn {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw ShapeError("box bounds differ in dimension");
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (!(hi[a] > lo[a])) throw DomainError("box has an empty side");
}

Box Box::cube(int d, double lo, double hi) {
  return Box(std::vector<double>(d, lo), std::vector<double>(d, hi));
}

double Box::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim(); ++a) m *= extent(a);
  return m;
}

double Box::boundary_measure() const {
  double total = 0.0;
  for (int a = 0; a < dim(); ++a) {
    double face = 1.0;
    for (int b = 0; b < dim(); ++b)
      if (b != a) face *= extent(b);
    total += 2.0 * face;
  }
  return total;
}

bool Box::contains(std::span<const double> y, double tol) const {
  if (static_cast<int>(y.size()) != dim()) return false;
  for (int a = 0; a < dim(); ++a)
    if (y[a] < lo[a] - tol || y[a] > hi[a] + tol) return false;
  return true;
}

Eigen::MatrixXd Box::map_from_unit(const Eigen::MatrixXd& unit) const {
  if (unit.rows() != dim()) throw ShapeError("unit points do not match box dimension");
  Eigen::MatrixXd out(unit.rows(), unit.cols());
  for (int a = 0; a < dim(); ++a) out.row(a) = (lo[a] + extent(a) * unit.row(a).array()).matrix();
  return out;
}

Box Geometry::space_time() const {
  std::vector<double> lo{0.0}, hi{t_final};
  lo.insert(lo.end(), space.lo.begin(), space.lo.end());
  hi.insert(hi.end(), space.hi.begin(), space.hi.end());
  return Box(std::move(lo), std::move(hi));
}

}  // namespace pinn
