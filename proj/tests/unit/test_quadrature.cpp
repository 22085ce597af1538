#include <cmath>
#include <algorithm>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "pinn/errors.hpp"
#include "pinn/quadrature.hpp"

using namespace pinn;

namespace {

// Index-weighted sums sum_{i=1}^{1000} i * x_i per dimension of the unscrambled
// Sobol sequence (zero point skipped), produced by scipy.stats.qmc.Sobol.
constexpr double kWeightedSums[100] = {250078.14453125, 250160.68359375, 250316.12109375, 250562.78515625, 249924.35546875, 251262.39453125, 250329.16796875, 250429.73828125, 250598.26953125, 249779.63671875, 249418.94921875, 250263.34765625, 250553.47265625, 250298.42578125, 249946.12109375, 249862.15234375, 250576.14453125, 250199.14453125, 250580.07421875, 250697.76171875, 250350.19921875, 250610.24609375, 250394.25390625, 250704.55078125, 249960.41015625, 251265.39453125, 250209.55078125, 250727.83984375, 250001.94140625, 249533.56640625, 249854.19921875, 249770.66015625, 250444.16796875, 249733.10546875, 250810.78515625, 250522.66015625, 250605.22265625, 250253.87109375, 250172.40234375, 250222.83984375, 251257.01171875, 250254.34765625, 250167.94921875, 250095.79296875, 249900.56640625, 249111.10546875, 250443.69140625, 251252.62890625, 250399.23046875, 250226.83984375, 250019.30078125, 250366.58203125, 250937.80859375, 250039.01953125, 250226.26953125, 250611.58203125, 249676.33203125, 249297.33203125, 250791.42578125, 250107.17578125, 249858.17578125, 250263.30078125, 250170.42578125, 249861.17578125, 250136.34765625, 249814.69140625, 250377.94140625, 249882.94140625, 249826.09765625, 250811.37890625, 249843.81640625, 250260.34765625, 251178.47265625, 249749.53515625, 249876.94140625, 250517.66015625, 250302.35546875, 250972.93359375, 250782.68359375, 249490.15234375, 249889.91796875, 250294.99609375, 251026.32421875, 250147.23046875, 249484.10546875, 250760.91796875, 250619.55859375, 250226.83984375, 249916.94921875, 250008.87109375, 250569.12109375, 250973.93359375, 250086.88671875, 250441.76171875, 249826.07421875, 250337.07421875, 249705.07421875, 250661.04296875, 250490.55859375, 249963.48046875};

}  // namespace

TEST_CASE("sobol small cases") {
  const auto a = sobol(3, 1);
  CHECK(a(0, 0) == 0.5);
  CHECK(a(0, 1) == 0.75);
  CHECK(a(0, 2) == 0.25);
  const auto b = sobol(1, 2);
  CHECK(b(0, 0) == 0.5);
  CHECK(b(1, 0) == 0.5);
  const auto c = sobol(8, 3);
  const double dim2[8] = {0.5, 0.25, 0.75, 0.625, 0.125, 0.875, 0.375, 0.9375};
  for (int i = 0; i < 8; ++i) CHECK(c(2, i) == dim2[i]);
}

TEST_CASE("sobol matches an independent generator in all 100 dimensions") {
  const auto s = sobol(1000, 100);
  for (int j = 0; j < 100; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 1000; ++i) acc += (i + 1) * s(j, i);
    CHECK(acc == doctest::Approx(kWeightedSums[j]).epsilon(1e-14));
  }
  const double point777[5] = {0.6923828125, 0.3564453125, 0.8642578125, 0.4267578125, 0.5107421875};
  const int dims[5] = {0, 5, 17, 63, 99};
  for (int k = 0; k < 5; ++k) CHECK(s(dims[k], 776) == point777[k]);
}

TEST_CASE("sobol errors and mean") {
  CHECK_THROWS_AS(sobol(4, 101), UnsupportedDimensionError);
  CHECK_THROWS_AS(sobol(4, 0), UnsupportedDimensionError);
  const auto s = sobol(4096, 2);
  CHECK(std::abs(s.row(0).mean() - 0.5) <= 1e-3);
  CHECK(std::abs(s.row(1).mean() - 0.5) <= 1e-3);
  CHECK(s.minCoeff() > 0.0);
  CHECK(s.maxCoeff() < 1.0);
}

TEST_CASE("uniform_random determinism and mean") {
  const auto a = uniform_random(100, 3, 42), b = uniform_random(100, 3, 42), c = uniform_random(100, 3, 43);
  CHECK(a == b);
  CHECK(a != c);
  const auto big = uniform_random(100000, 1, 7);
  CHECK(std::abs(big.mean() - 0.5) <= 3.0 / std::sqrt(12.0) / std::sqrt(1e5));
  CHECK(big.minCoeff() >= 0.0);
  CHECK(big.maxCoeff() < 1.0);
}

TEST_CASE("gauss-legendre basics") {
  const auto r = gauss_legendre_composite(1, 2, Box({-1.0}, {1.0}));
  REQUIRE(r.size() == 2);
  CHECK(r.points(0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.points(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.weights(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.weights(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r.integrate([](auto y) { return std::pow(y(0), 3); })) <= 1e-14);
  const auto q = gauss_legendre_composite(1, 4, Box({0.0}, {1.0}));
  CHECK(std::abs(q.integrate([](auto y) { return std::pow(y(0), 4); }) - 0.2) <= 1e-13);
}

TEST_CASE("gauss-legendre exactness up to degree 2n-1") {
  for (int n = 1; n <= 12; ++n) {
    for (int cells : {1, 3}) {
      const auto r = gauss_legendre_composite(cells, n, Box({-0.5}, {1.5}));
      CHECK(r.total_weight() == doctest::Approx(2.0).epsilon(1e-13));
      for (int p = 0; p <= 2 * n - 1; ++p) {
        const double exact = (std::pow(1.5, p + 1) - std::pow(-0.5, p + 1)) / (p + 1);
        const double got = r.integrate([p](auto y) { return std::pow(y(0), p); });
        CHECK(std::abs(got - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
      }
    }
  }
  // Tensor product in 3D: x^a y^b z^c on [0,1]^3.
  const auto r3 = gauss_legendre_composite(2, 3, Box::cube(3, 0.0, 1.0));
  CHECK(r3.size() == 216);
  const double got = r3.integrate([](auto y) { return std::pow(y(0), 5) * std::pow(y(1), 2) * y(2); });
  CHECK(got == doctest::Approx(1.0 / 6 / 3 / 2).epsilon(1e-13));
}

TEST_CASE("training set for 1D heat geometry") {
  Geometry g{Box({-1.0}, {1.0}), 1.0, false};
  for (RuleKind kind : {RuleKind::Sobol, RuleKind::MonteCarlo}) {
    const TrainingSet s = build_training_set(g, 100, 8, 16, kind, 3);
    REQUIRE(s.n_sb() == 8);
    int lo = 0, hi = 0;
    for (int n = 0; n < s.n_sb(); ++n) {
      const double x = s.spatial_boundary.points(1, n), t = s.spatial_boundary.points(0, n);
      CHECK(t > 0.0);
      CHECK(t < 1.0);
      if (x == -1.0) {
        ++lo;
        CHECK(s.spatial_boundary.labels[n] == 0);
      } else if (x == 1.0) {
        ++hi;
        CHECK(s.spatial_boundary.labels[n] == 1);
      }
    }
    CHECK(lo == 4);
    CHECK(hi == 4);
    CHECK(s.spatial_boundary.total_weight() == doctest::Approx(2.0));
    CHECK(s.interior.total_weight() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.temporal_boundary.total_weight() == doctest::Approx(2.0).epsilon(1e-12));
    for (int n = 0; n < s.n_tb(); ++n) CHECK(s.temporal_boundary.points(0, n) == 0.0);
    for (int n = 0; n < s.n_int(); ++n) {
      CHECK(s.interior.points(0, n) > 0.0);
      CHECK(s.interior.points(0, n) < 1.0);
      CHECK(std::abs(s.interior.points(1, n)) < 1.0);
    }
    CHECK(s.sb_partner.size() == 0);
  }
}

TEST_CASE("training set face split and periodic pairing") {
  Geometry g{Box({0.0, 0.0}, {2.0, 1.0}), 0.5, false};
  const TrainingSet s = build_training_set(g, 64, 60, 32, RuleKind::MonteCarlo, 1);
  std::vector<int> per_face(4, 0);
  for (int l : s.spatial_boundary.labels) ++per_face[l];
  // Faces x=0, x=2 have measure 0.5, faces y=0, y=1 measure 1.
  CHECK(per_face[0] == 10);
  CHECK(per_face[1] == 10);
  CHECK(per_face[2] == 20);
  CHECK(per_face[3] == 20);
  CHECK(s.spatial_boundary.total_weight() == doctest::Approx(0.5 * 6.0).epsilon(1e-12));

  g.periodic = true;
  const TrainingSet p = build_training_set(g, 64, 60, 32, RuleKind::Sobol, 1);
  REQUIRE(p.sb_partner.cols() == p.n_sb());
  for (int n = 0; n < p.n_sb(); ++n) {
    const int axis = p.spatial_boundary.labels[n] / 2;
    CHECK(p.spatial_boundary.labels[n] % 2 == 0);
    CHECK(p.spatial_boundary.points(1 + axis, n) == g.space.lo[axis]);
    CHECK(p.sb_partner(1 + axis, n) == g.space.hi[axis]);
    for (int r = 0; r < 3; ++r)
      if (r != 1 + axis) CHECK(p.sb_partner(r, n) == p.spatial_boundary.points(r, n));
  }
}

TEST_CASE("training set errors, determinism and csv") {
  Geometry g{Box({-1.0}, {1.0}), 1.0, false};
  CHECK_THROWS_AS(build_training_set(g, 0, 8, 8, RuleKind::Sobol, 0), EmptyRuleError);
  CHECK_THROWS_AS(build_training_set(g, 8, 0, 8, RuleKind::Sobol, 0), EmptyRuleError);
  const auto a = build_training_set(g, 50, 8, 8, RuleKind::MonteCarlo, 9);
  const auto b = build_training_set(g, 50, 8, 8, RuleKind::MonteCarlo, 9);
  CHECK(a.interior.points == b.interior.points);
  // Distinct substreams per set: interior and initial x-samples differ.
  CHECK(a.interior.points(1, 0) != a.temporal_boundary.points(1, 0));
  std::ostringstream os;
  write_training_set_csv(os, a);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x1,weight,set\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 50 + 8 + 8);
}
