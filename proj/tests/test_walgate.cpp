#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "loccsim/loccsim.hpp"

using namespace loccsim;

namespace {

std::mt19937_64 rng(20260816);

Mat random_traceless(int n) {
  std::normal_distribution<double> g;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
  m -= (m.trace() / static_cast<double>(n)) * Mat::Identity(n, n);
  return m;
}

Ket random_state(const SystemLayout& L) {
  std::normal_distribution<double> g;
  Vec v(L.total_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cd(g(rng), g(rng));
  return Ket(L, v, "r").normalized();
}

std::pair<Ket, Ket> random_orthogonal_pair(const SystemLayout& L) {
  Ket a = random_state(L);
  Ket b = random_state(L);
  b = b - inner(a, b) * a;
  b = b.normalized();
  a.label = "first";
  b.label = "second";
  return {a, b};
}

}  // namespace

TEST_CASE("diagonal-zeroing unitary on closed-form and random inputs") {
  Mat d2 = Mat::Zero(2, 2);
  d2(0, 0) = 1.0;
  d2(1, 1) = -1.0;
  Mat u = zero_diagonal_unitary(d2);
  Mat rot = u * d2 * u.adjoint();
  REQUIRE(std::abs(rot(0, 0)) < 1e-12);
  REQUIRE(std::abs(rot(1, 1)) < 1e-12);

  Mat off(2, 2);
  off << 0, 1, 1, 0;
  REQUIRE((zero_diagonal_unitary(off) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() ==
          0.0);

  Mat not_traceless = Mat::Identity(3, 3);
  REQUIRE_THROWS_AS(zero_diagonal_unitary(not_traceless), LayoutError);

  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(trial % 5);
    Mat m = random_traceless(n);
    Mat w = zero_diagonal_unitary(m);
    REQUIRE((w * w.adjoint() - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    Mat r = w * m * w.adjoint();
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(r(i, i)) < 1e-10);
  }
}

TEST_CASE("two orthogonal pure states are always told apart in one round") {
  for (int da : {2, 3, 4}) {
    SystemLayout L({{"A", da, "Alice"}, {"B", da, "Bob"}});
    for (int trial = 0; trial < 40; ++trial) {
      auto [a, b] = random_orthogonal_pair(L);
      TwoStateProtocol p = walgate_protocol(a, b);
      TwoStateOutcome ra = run_two_state(p, a);
      TwoStateOutcome rb = run_two_state(p, b);
      REQUIRE(ra.winner == "first");
      REQUIRE(rb.winner == "second");
      REQUIRE(ra.p_first == Catch::Approx(1.0).margin(1e-9));
      REQUIRE(rb.p_second == Catch::Approx(1.0).margin(1e-9));
      REQUIRE(ra.p_first + ra.p_second == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("bell-like pair splits into per-branch certainties") {
  SystemLayout L({{"A", 2, "Alice"}, {"B", 2, "Bob"}});
  Ket plus(L, lv({1, 0, 0, 1}), "plus");
  Ket minus(L, lv({1, 0, 0, -1}), "minus");
  TwoStateProtocol p = walgate_protocol(plus, minus);
  REQUIRE(run_two_state(p, plus).p_first == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(run_two_state(p, minus).p_second == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("product pair with orthogonal local halves uses constant branches") {
  SystemLayout L({{"A", 2, "Alice"}, {"B", 2, "Bob"}});
  Ket zero(L, lv({1, 0, 0, 0}), "zz");
  Ket one(L, lv({0, 0, 0, 1}), "oo");
  TwoStateProtocol p = walgate_protocol(zero, one);
  REQUIRE(run_two_state(p, zero).p_first == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(run_two_state(p, one).p_second == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("non-orthogonal inputs are rejected, foreign inputs split mass") {
  SystemLayout L({{"A", 2, "Alice"}, {"B", 2, "Bob"}});
  Ket a(L, lv({1, 0, 0, 0}), "a");
  Ket c(L, lv({1, 0, 0, 1}), "c");
  REQUIRE_THROWS_AS(walgate_protocol(a, c), LayoutError);

  auto [x, y] = random_orthogonal_pair(L);
  TwoStateProtocol p = walgate_protocol(x, y);
  Ket foreign = random_state(L);
  TwoStateOutcome r = run_two_state(p, foreign);
  REQUIRE(r.p_first + r.p_second == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(r.ambiguity >= -1e-12);
}

TEST_CASE("rescaled and rephased inputs give the same verdict") {
  SystemLayout L({{"A", 3, "Alice"}, {"B", 3, "Bob"}});
  auto [a, b] = random_orthogonal_pair(L);
  TwoStateProtocol p = walgate_protocol(a, b);
  Ket scaled = cd(0.0, 2.5) * a;
  TwoStateOutcome r = run_two_state(p, scaled);
  REQUIRE(r.winner == "first");
  REQUIRE(r.p_first == Catch::Approx(1.0).margin(1e-9));
}
