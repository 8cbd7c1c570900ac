#include <doctest.h>

#include <string>

#include "dlorenz/model_config.hpp"

using namespace dlorenz;
using nlohmann::json;

namespace {

const std::string data = DLORENZ_TEST_DATA;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ZeroB;
}

}  // namespace

TEST_CASE("fixtures load and classify") {
  CHECK(classify_tangency(load_model(data + "/case1.json").global) == TangencyCase::CaseI);
  CHECK(classify_tangency(load_model(data + "/case2.json").global) == TangencyCase::CaseII);
  CHECK(classify_tangency(load_model(data + "/simple.json").global) == TangencyCase::Simple);
  CHECK(classify_tangency(load_model(data + "/degenerate.json").global) == TangencyCase::Degenerate);
  CHECK(load_model(data + "/case2.json").declared_case == TangencyCase::CaseII);
}

TEST_CASE("explicit case I fixture equals the built-in default") {
  const Model a = load_model(data + "/case1.json");
  CHECK(model_to_json(a) == model_to_json(default_model(TangencyCase::CaseI)));
}

TEST_CASE("round trip through JSON") {
  Model m = load_model(data + "/tails.json");
  CHECK(m.tails.quadratic[0][0][0] == 0.1);
  CHECK(m.tails.quadratic[1][1][1] == -0.2);
  CHECK(m.tails.cubic_u[2] == 0.3);
  CHECK(m.pi_minus_half == State3{0.1, 0.1, 0.1});
  const json j = model_to_json(m);
  CHECK(j.at("schema") == kModelSchema);
  CHECK(model_to_json(model_from_json(j)) == j);
}

TEST_CASE("errors") {
  CHECK(kind_of([] { load_model(data + "/zero_d.json"); }) == ErrorKind::DegenerateD);
  CHECK_NOTHROW(load_model(data + "/zero_d.json", false));
  CHECK(kind_of([] { load_model(data + "/malformed.json"); }) == ErrorKind::Config);
  CHECK(kind_of([] { load_model(data + "/does-not-exist.json"); }) == ErrorKind::Config);
  CHECK(kind_of([] { model_from_json(json{{"schema", "other/2"}}); }) == ErrorKind::Config);
  CHECK(kind_of([] { model_from_json(json{{"saddle", {{"lambda1", "x"}}}}); }) == ErrorKind::Config);
  CHECK(kind_of([] { model_from_json(json::array()); }) == ErrorKind::Config);
  CHECK(kind_of([] { model_from_json(json{{"saddle", {{"lambda1", 0.3}}}}); }) == ErrorKind::ConditionA);
  CHECK(kind_of([] { parse_case("III"); }) == ErrorKind::Config);
  json bad_tail = model_to_json(default_model(TangencyCase::CaseI));
  bad_tail["tails"]["quadratic"][2][2][2] = 1.0;
  CHECK(kind_of([&] { model_from_json(bad_tail); }) == ErrorKind::Config);
}

TEST_CASE("parse_case spellings") {
  CHECK(parse_case("I") == TangencyCase::CaseI);
  CHECK(parse_case("CaseI") == TangencyCase::CaseI);
  CHECK(parse_case("2") == TangencyCase::CaseII);
  CHECK(parse_case("II") == TangencyCase::CaseII);
}
