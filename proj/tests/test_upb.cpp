#include <catch2/catch_amalgamated.hpp>

#include "loccsim/loccsim.hpp"

using namespace loccsim;

namespace {

SeesawConfig seeded(std::uint64_t seed) {
  SeesawConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("complement ranks of the built-in product families") {
  Projector c5 = complement_projector(tiles5().pure_states());
  REQUIRE(std::lround(c5.matrix.trace().real()) == 4);

  Projector c12 = complement_projector(quad_upb().pure_states());
  REQUIRE(std::lround(c12.matrix.trace().real()) == 4);

  Projector c16 = complement_projector(quad_product_basis().pure_states());
  REQUIRE(c16.matrix.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("five-tile family leaves no product state in its complement") {
  UpbVerdict v = check_upb(tiles5(), seeded(42));
  REQUIRE(v.complement_rank == 4);
  REQUIRE_FALSE(v.degenerate);
  REQUIRE_FALSE(v.extendible);
  REQUIRE(v.verdict() == "unextendible-candidate");
  REQUIRE(v.max_overlap < 1.0 - 1e-6);
  REQUIRE(max_trace_regression(v) <= 1e-12);
}

TEST_CASE("twelve-member ququad family is likewise a dead end") {
  UpbVerdict v = check_upb(quad_upb(), seeded(42));
  REQUIRE(v.complement_rank == 4);
  REQUIRE_FALSE(v.extendible);
  REQUIRE(v.max_overlap < 1.0 - 1e-6);
  REQUIRE(max_trace_regression(v) <= 1e-12);
}

TEST_CASE("full product basis has an empty complement") {
  UpbVerdict v = check_upb(quad_product_basis(), seeded(1));
  REQUIRE(v.degenerate);
  REQUIRE(v.complement_rank == 0);
  REQUIRE(v.verdict() == "degenerate(empty-complement)");
}

TEST_CASE("removing the stopper exposes a product witness") {
  UpbVerdict v = check_upb(tiles4_no_stopper(), seeded(7));
  REQUIRE(v.extendible);
  REQUIRE(v.max_overlap >= 1.0 - 1e-9);
  // the witness must be orthogonal to every remaining tile
  Ket w = product_ket(qutrit_pair_layout(), {v.witness_a, v.witness_b}, "w");
  for (const auto& t : tiles4_no_stopper().pure_states())
    REQUIRE(std::abs(inner(t.normalized(), w)) < 1e-4);
  // and |1>|1> certifies by hand that one exists
  Projector q = complement_projector(tiles4_no_stopper().pure_states());
  Vec e11 = Vec::Zero(9);
  e11[4] = 1.0;
  REQUIRE(std::real((e11.adjoint() * q.matrix * e11)(0, 0)) ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("same seed, same verdict, same witness") {
  UpbVerdict a = check_upb(tiles5(), seeded(99));
  UpbVerdict b = check_upb(tiles5(), seeded(99));
  REQUIRE(a.max_overlap == b.max_overlap);
  REQUIRE((a.witness_a - b.witness_a).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.witness_b - b.witness_b).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.traces == b.traces);
}

TEST_CASE("reported witness reproduces the reported overlap") {
  for (std::uint64_t seed : {3ull, 4ull}) {
    UpbVerdict v = check_upb(tiles4_no_stopper(), seeded(seed));
    Projector q = complement_projector(tiles4_no_stopper().pure_states());
    Vec ab(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ab[i * 3 + j] = v.witness_a[i] * v.witness_b[j];
    const double replay = std::real((ab.adjoint() * q.matrix * ab)(0, 0));
    REQUIRE(replay == Catch::Approx(v.max_overlap).margin(1e-10));
  }
}

TEST_CASE("seesaw rejects malformed inputs") {
  REQUIRE_THROWS_AS(check_upb(tiles_rho_psi(), seeded(0)), LayoutError);
  REQUIRE_THROWS_AS(check_upb(tiles6(), seeded(0)), LayoutError);  // entangled member
  SeesawConfig bad;
  bad.restarts = 0;
  REQUIRE_THROWS_AS(bad.validate(), LayoutError);
  REQUIRE_THROWS_AS(seesaw_max_product_overlap(Mat::Zero(4, 4), 3, 2, seeded(0)),
                    LayoutError);
}
