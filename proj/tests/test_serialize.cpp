#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "loccsim/loccsim.hpp"

using namespace loccsim;

TEST_CASE("export and import round-trip both built-in trees exactly") {
  for (const auto& name : protocol_names()) {
    ProtocolTree t = protocol_by_name(name);
    std::string text = export_protocol_text(t);
    ProtocolTree back = import_protocol(text);
    REQUIRE(protocols_equal(t, back));
  }
}

TEST_CASE("re-export of an imported tree is byte-stable") {
  for (const auto& name : protocol_names()) {
    std::string once = export_protocol_text(protocol_by_name(name));
    std::string twice = export_protocol_text(import_protocol(once));
    REQUIRE(once == twice);
  }
}

TEST_CASE("parse errors carry line and column") {
  const std::string broken = "{\n  \"format\": \"loccsim.protocol\",\n  oops\n}";
  try {
    import_protocol(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line == 3);
    REQUIRE(e.column >= 1);
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 3"));
  }
}

TEST_CASE("structural validation points at the offending node") {
  ordered_json j = export_protocol(prop1_protocol());

  SECTION("format tag") {
    j["format"] = "something-else";
    REQUIRE_THROWS_MATCHES(import_protocol_json(j), ParseError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("format")));
  }
  SECTION("version") {
    j["version"] = 9;
    REQUIRE_THROWS_AS(import_protocol_json(j), ParseError);
  }
  SECTION("missing child") {
    j["root"]["outcomes"][0].erase("child");
    try {
      import_protocol_json(j);
      FAIL("expected a validation error");
    } catch (const ParseError& e) {
      REQUIRE_THAT(e.what(),
                   Catch::Matchers::ContainsSubstring("outcomes[0]"));
    }
  }
  SECTION("unknown subsystem id") {
    j["root"]["subsystems"] = {"Q", "b"};
    REQUIRE_THROWS_MATCHES(import_protocol_json(j), ParseError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("'Q'")));
  }
  SECTION("non-orthonormal projector vectors") {
    auto& vecs = j["root"]["outcomes"][0]["projector"]["vectors"];
    vecs.push_back(vecs[0]);
    REQUIRE_THROWS_MATCHES(import_protocol_json(j), ParseError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("orthonormal")));
  }
}

TEST_CASE("remainder outcomes only close a measurement") {
  ordered_json j = export_protocol(prop1_protocol());
  // find a node that exports a remainder outcome: the left-tiles split has one
  ordered_json& alice = j["root"]["outcomes"][0]["child"];
  ordered_json& s_node = alice["outcomes"][0]["child"];
  REQUIRE(s_node["outcomes"].back()["projector"].contains("remainder"));

  SECTION("remainder must come last") {
    auto moved = s_node["outcomes"].back();
    s_node["outcomes"].erase(s_node["outcomes"].size() - 1);
    s_node["outcomes"].insert(s_node["outcomes"].begin(), moved);
    REQUIRE_THROWS_MATCHES(import_protocol_json(j), ParseError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("remainder")));
  }
  SECTION("remainder needs predecessors") {
    ordered_json solo = export_protocol(prop1_protocol());
    ordered_json& out = solo["root"]["outcomes"];
    while (out.size() > 1) out.erase(0);
    REQUIRE(out.size() == 1);
    out[0]["projector"] = {{"remainder", true}};
    REQUIRE_THROWS_MATCHES(import_protocol_json(solo), ParseError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("remainder")));
  }
}

TEST_CASE("imported trees verify exactly like the originals") {
  ProtocolTree back = import_protocol(export_protocol_text(prop3_protocol()));
  VerificationReport r = verify(back, quad13());
  CAPTURE(r.diagnostics);
  REQUIRE(r.pass);
}

TEST_CASE("tree comparison notices any drift") {
  ProtocolTree a = prop1_protocol();
  ProtocolTree b = prop1_protocol();
  REQUIRE(protocols_equal(a, b));
  b.resource.amplitudes[0] += 1e-15;
  REQUIRE_FALSE(protocols_equal(a, b));
}
