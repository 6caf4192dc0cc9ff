#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "loccsim/loccsim.hpp"

using namespace loccsim;

static SystemLayout two_qutrits() {
  return SystemLayout({{"A", 3, "Alice"}, {"B", 3, "Bob"}});
}

TEST_CASE("layout lookups and digit arithmetic") {
  SystemLayout L({{"A", 3, "Alice"}, {"a", 2, "Alice"}, {"B", 3, "Bob"}});
  REQUIRE(L.total_dim() == 18);
  REQUIRE(L.position_of("a") == 1);
  REQUIRE(L.party_dim("Alice") == 6);
  REQUIRE(L.party_dim("Bob") == 3);
  REQUIRE(L.parties() == std::vector<std::string>{"Alice", "Bob"});

  std::vector<int> d(3);
  for (int g = 0; g < 18; ++g) {
    L.digits_of(g, d);
    REQUIRE(L.index_from_digits(d) == g);
  }
  REQUIRE_THROWS_AS(L.position_of("x"), LayoutError);
  REQUIRE_THROWS_AS(SystemLayout({{"A", 3, "Alice"}, {"A", 2, "Bob"}}), LayoutError);
  REQUIRE_THROWS_AS(L.positions_of({"B", "A"}), LayoutError);  // out of order
}

TEST_CASE("concat preserves order and same_structure semantics") {
  SystemLayout full = concat(two_qutrits(), resource_layout());
  REQUIRE(full.size() == 4);
  REQUIRE(full.total_dim() == 36);
  REQUIRE(full.subsystems()[2].id == "a");
  REQUIRE(full.same_structure(concat(two_qutrits(), resource_layout())));
  REQUIRE_FALSE(full.same_structure(two_qutrits()));
}

TEST_CASE("tensor products and inner products agree with digit order") {
  SystemLayout L = two_qutrits();
  Ket k = product_ket(L, {lv({1, 0, 0}), lv({0, 1, 0})}, "e01");
  REQUIRE(k.amplitudes[1] == cd(1, 0));
  REQUIRE(k.norm() == Catch::Approx(1.0));

  Ket a(SystemLayout({{"A", 2, "Alice"}}), lv({1, 2}), "a");
  Ket b(SystemLayout({{"B", 2, "Bob"}}), lv({3, 4}), "b");
  Ket ab = tensor(a, b, "ab");
  REQUIRE(ab.amplitudes[0] == cd(3, 0));
  REQUIRE(ab.amplitudes[1] == cd(4, 0));
  REQUIRE(ab.amplitudes[2] == cd(6, 0));
  REQUIRE(ab.amplitudes[3] == cd(8, 0));
  REQUIRE(inner(ab, ab).real() == Catch::Approx(ab.norm2()));
}

TEST_CASE("embed_matrix places a middle-subsystem operator correctly") {
  SystemLayout L({{"x", 2, "Alice"}, {"y", 2, "Alice"}, {"z", 2, "Bob"}});
  Mat flip(2, 2);
  flip << 0, 1, 1, 0;
  Mat big = embed_matrix(L, {"y"}, flip);
  // |x y z> index: x*4 + y*2 + z; flipping y maps 0<->2, 1<->3, 4<->6, 5<->7
  Ket in(L, basis_vec(8, 1), "in");
  Vec out = big * in.amplitudes;
  REQUIRE(out[3] == cd(1, 0));
  REQUIRE(out.cwiseAbs().sum() == Catch::Approx(1.0));
}

TEST_CASE("partial trace of an entangled pure state is maximally mixed") {
  Ket phi = resource_phi();
  DensityOperator rho = density_from_ket(phi);
  DensityOperator ra = partial_trace(rho, {"a"});
  REQUIRE(ra.validate().ok);
  REQUIRE((ra.matrix - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // product state reduces to a pure marginal
  SystemLayout L = two_qutrits();
  Ket prod = product_ket(L, {lv({1, 1, 0}), lv({0, 0, 1})}, "p");
  DensityOperator rb = partial_trace(density_from_ket(prod), {"B"});
  REQUIRE(rb.matrix(2, 2).real() == Catch::Approx(1.0));
}

TEST_CASE("is_projective_measurement names each broken invariant") {
  SystemLayout L = two_qutrits();
  Projector p0 = projector_from_span(L, {"A"}, {lv({1, 0, 0})});
  Projector p1 = projector_from_span(L, {"A"}, {lv({0, 1, 0}), lv({0, 0, 1})});
  REQUIRE(is_projective_measurement({p0, p1}).ok);

  Projector skew = p0;
  skew.matrix(0, 1) = cd(0.5, 0);
  REQUIRE_THAT(is_projective_measurement({skew, p1}).failure,
               Catch::Matchers::ContainsSubstring("not hermitian"));

  Projector scaled = p0;
  scaled.matrix *= 2.0;
  REQUIRE_THAT(is_projective_measurement({scaled, p1}).failure,
               Catch::Matchers::ContainsSubstring("not idempotent"));

  Projector overlap = projector_from_span(L, {"A"}, {lv({0, 1, 0})});
  REQUIRE_THAT(is_projective_measurement({p0, p1, overlap}).failure,
               Catch::Matchers::ContainsSubstring("not orthogonal"));

  REQUIRE_THAT(is_projective_measurement({p0}).failure,
               Catch::Matchers::ContainsSubstring("incomplete"));

  Projector other_slice = projector_from_span(L, {"B"}, {lv({1, 0, 0})});
  REQUIRE_THAT(is_projective_measurement({p0, other_slice}).failure,
               Catch::Matchers::ContainsSubstring("slice mismatch"));
}

TEST_CASE("remainder projector completes any partial split") {
  SystemLayout L = two_qutrits();
  Projector p0 = projector_from_span(L, {"B"}, {lv({1, 0, 1})});
  Projector rest = remainder_projector({p0});
  REQUIRE(rest.remainder);
  REQUIRE(is_projective_measurement({p0, rest}).ok);
}

TEST_CASE("measurement outcome masses always sum to the input mass") {
  SystemLayout full = concat(two_qutrits(), resource_layout());
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  auto random_ket = [&](const SystemLayout& L) {
    Vec v(L.total_dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cd(gauss(rng), gauss(rng));
    return Ket(L, v, "r").normalized();
  };

  for (int trial = 0; trial < 25; ++trial) {
    Projector p0 = projector_from_span(full, {"B", "b"},
                                       {random_ket(SystemLayout({{"s", 6, "x"}})).amplitudes});
    Projector p1 = remainder_projector({p0});
    LocalMeasurement m{"split", "Bob", {"hit", "miss"}, {p0, p1}};

    std::vector<BranchState> in;
    in.push_back({"c", "c", random_ket(full), true, 1.0});
    auto split = apply_local_measurement(in, m, full);
    double mass = 0.0;
    for (const auto& branch : split)
      for (const auto& s : branch) mass += s.state.norm2();
    REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-10));
  }
}
