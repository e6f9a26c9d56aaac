#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "kit/numeric_io.hpp"
#include "support.hpp"

using namespace kit;

namespace {

std::string fixture(const std::string& name) { return std::string(KIT_FIXTURES) + "/" + name; }

AInftyStructure parse(const std::string& text) { return io::structure_from_json(json::parse(text)); }

} // namespace

TEST(StructureIo, FixturesRoundTrip) {
  for (const auto* name : {"exterior.json", "curved.json", "interval_A.json", "interval_B.json", "no_unit.json", "unit_only.json"}) {
    auto j = io::read_json(fixture(name));
    auto A = io::structure_from_json(j, name);
    auto k = io::structure_to_json(A);
    auto B = io::structure_from_json(k, name);
    EXPECT_EQ(io::structure_to_json(B), k) << name;
    EXPECT_EQ(A.ops(), B.ops()) << name;
    EXPECT_EQ(A.cy_dim(), B.cy_dim());
  }
}

TEST(StructureIo, RandomAlgebrasRoundTrip) {
  for (const auto& A : testkit::random_algebras(6, 101)) {
    auto B = io::structure_from_json(io::structure_to_json(*A));
    EXPECT_EQ(B.ops(), A->ops());
    EXPECT_EQ(B.hom().size(), A->hom().size());
  }
}

TEST(StructureIo, BigCoefficientsSurviveAsStrings) {
  auto A = parse(R"({"objects":["X"],"hom":{"X,X":[{"name":"e","degree":0}]},
    "ops":[{"inputs":[["X,X","e"],["X,X","e"]],"output":["X,X","e"],"coeff":["1"]}],"trunc_order":2})");
  auto j = io::integer_to_json(Integer(1) << 90);
  EXPECT_TRUE(j.is_string());
  EXPECT_EQ(io::integer_from_json(j, "x"), Integer(1) << 90);
  EXPECT_EQ(io::integer_from_json(json(-7), "x"), -7);
  EXPECT_THROW(io::integer_from_json(json("12a"), "x"), InputError);
  EXPECT_EQ(A.trunc_order(), 2);
}

TEST(StructureIo, InputErrors) {
  EXPECT_THROW(parse(R"({"objects":[]})"), InputError);
  const std::string head = R"({"objects":["X"],"hom":{"X,X":[{"name":"e","degree":0},{"name":"x","degree":1}]},"ops":[)";
  EXPECT_NO_THROW(parse(head + R"({"inputs":[["X,X","e"],["X,X","e"]],"output":["X,X","e"],"coeff":[1]}]})"));
  EXPECT_THROW(parse(head + R"({"inputs":["e","e"],"output":["X,X","e"],"coeff":[1]}]})"), InputError);
  EXPECT_THROW(parse(head + R"({"inputs":[["X,X","e"],["X,X","f"]],"output":["X,X","e"],"coeff":[1]}]})"), InputError);
  EXPECT_THROW(parse(head + R"({"d":3,"inputs":[["X,X","e"],["X,X","e"]],"output":["X,X","e"],"coeff":[1]}]})"), InputError);
  EXPECT_THROW(parse(head + R"({"inputs":[["X,X","e"],["X,X","e"]],"output":["X,X","e"]}]})"), InputError);
  // e * e -> x with |x| = 1 has the wrong degree
  EXPECT_THROW(parse(head + R"({"inputs":[["X,X","e"],["X,X","e"]],"output":["X,X","x"],"coeff":[1]}]})"), InputError);
  EXPECT_THROW(io::load_structure(fixture("does_not_exist.json")), InputError);
  EXPECT_THROW(io::load_structure(fixture("curved_constant.json")), InputError);
}

TEST(StructureIo, TruncationOverride) {
  auto A = io::load_structure(fixture("curved.json"), 1);
  EXPECT_EQ(A.trunc_order(), 1);
  for (const auto& [k, v] : A.ops())
    for (const auto& [g, c] : v) EXPECT_EQ(c.order(), 1);
}

TEST(MorphismIo, RoundTrip) {
  std::mt19937_64 rng(102);
  for (const auto& A : testkit::random_algebras(4, 103)) {
    auto V = std::make_shared<const Bimodule>(dual_diagonal_bimodule(A));
    auto D = std::make_shared<const Bimodule>(diagonal_bimodule(A));
    auto f = testkit::random_morphism(V, D, 1, 3, rng, 0.5);
    auto j = io::morphism_to_json(f, "dual_diagonal", "diagonal");
    auto g = io::morphism_from_json(j, V, D);
    EXPECT_EQ(f, g);
    EXPECT_EQ(io::morphism_to_json(g, "dual_diagonal", "diagonal"), j);
  }
}

TEST(MorphismIo, RejectsInhomogeneousComponents) {
  auto A = std::make_shared<const AInftyStructure>(io::load_structure(fixture("exterior.json")));
  auto V = std::make_shared<const Bimodule>(dual_diagonal_bimodule(A));
  auto D = std::make_shared<const Bimodule>(diagonal_bimodule(A));
  auto j = io::read_json(fixture("exterior_delta.json"));
  j["degree"] = j["degree"].get<int>() + 1;
  EXPECT_THROW(io::morphism_from_json(j, V, D), InputError);
}

TEST(FunctorIo, RoundTripAndErrors) {
  auto A = std::make_shared<const AInftyStructure>(io::load_structure(fixture("interval_A.json")));
  auto B = std::make_shared<const AInftyStructure>(io::load_structure(fixture("interval_B.json")));
  auto j = io::read_json(fixture("interval_Q.json"));
  auto Q = io::functor_from_json(j, A, B);
  auto Q2 = io::functor_from_json(io::functor_to_json(Q), A, B);
  EXPECT_EQ(io::functor_to_json(Q2), io::functor_to_json(Q));
  auto bad = j;
  bad["object_map"] = json::object();
  EXPECT_THROW(io::functor_from_json(bad, A, B), InputError);
}

TEST(ComplexIo, RoundTripAndErrors) {
  auto C = io::complex_from_json(io::read_json(fixture("times_two_complex.json")));
  auto D = io::complex_from_json(io::complex_to_json(C));
  EXPECT_EQ(io::complex_to_json(D), io::complex_to_json(C));
  auto H = io::homology_to_json(homology(C));
  EXPECT_EQ(H["1"]["torsion"], json::array({2}));
  EXPECT_THROW(io::complex_from_json(json::parse(R"({"lowest_degree":0,"ranks":[1,1,1],"differentials":[[[1]],[[1]]]})")),
               InputError);
  EXPECT_THROW(io::complex_from_json(json::parse(R"({"lowest_degree":0,"ranks":[1,-1],"differentials":[[[1]]]})")), InputError);
  EXPECT_THROW(io::complex_from_json(json::parse(R"({"lowest_degree":0,"ranks":[1,1],"differentials":[]})")), InputError);
}

TEST(NumericIo, StripAndFlowRoundTrip) {
  for (const auto* name : {"strip_e_minus_1.json", "strip_bump.json", "strip_glue_left.json", "strip_index.json"}) {
    auto P = io::strip_from_json(io::read_json(fixture(name)), name);
    auto j = io::strip_to_json(P);
    auto Q = io::strip_from_json(j, name);
    EXPECT_EQ(io::strip_to_json(Q), j) << name;
    EXPECT_EQ(Q.n_t, P.n_t);
  }
  for (const auto* name : {"flow_small_r.json", "flow_flipped.json", "flow_sharp.json"}) {
    auto F = io::flow_from_json(io::read_json(fixture(name)), name);
    auto j = io::flow_to_json(F);
    EXPECT_EQ(io::flow_to_json(io::flow_from_json(j, name)), j) << name;
  }
}

TEST(NumericIo, ProfileTermsAndErrors) {
  auto p = io::profile_from_json(json::parse(R"({"terms":[{"kind":"tanh_step","from":0.5,"to":1.0,"width":0.4},
      {"kind":"indicator","lo":-1,"hi":1,"value":2,"t":"sin"}]})"), "p");
  ASSERT_EQ(p.terms.size(), 2u);
  EXPECT_FALSE(p.t_independent());
  EXPECT_EQ(io::profile_from_json(io::profile_to_json(p), "p").terms.size(), 2u);
  EXPECT_DOUBLE_EQ(io::profile_from_json(json(0.25), "p")(3.0), 0.25);
  EXPECT_THROW(io::profile_from_json(json::parse(R"({"terms":[{"kind":"wave"}]})"), "p"), InputError);
  EXPECT_THROW(io::profile_from_json(json::parse(R"({"terms":[{"kind":"step","from":0}]})"), "p"), InputError);
  EXPECT_THROW(io::profile_from_json(json::parse(R"({"terms":[{"kind":"bump","t":"tan"}]})"), "p"), InputError);
  auto s = io::read_json(fixture("strip_bump.json"));
  s["h_t"] = 0.3;
  EXPECT_THROW(io::strip_from_json(s), InputError);
  s["h_t"] = 0.125;
  s["window"] = json::array({1});
  EXPECT_THROW(io::strip_from_json(s), InputError);
  auto f = io::read_json(fixture("flow_small_r.json"));
  f["r_grid"] = json::object({{"lo", 0.1}, {"hi", 0.2}, {"count", 0}});
  EXPECT_THROW(io::flow_from_json(f), InputError);
  f.erase("c");
  EXPECT_THROW(io::flow_from_json(f), InputError);
}

TEST(Files, ReadWriteAndParseErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "kit_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.json").string();
  io::write_file(path, io::dump(json{{"a", 1}}));
  EXPECT_EQ(io::read_json(path)["a"], 1);
  io::write_file(path, "{ not json");
  EXPECT_THROW(io::read_json(path), InputError);
  std::filesystem::remove_all(dir);
}
