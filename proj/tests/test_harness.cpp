#include <doctest.h>

#include "fbmr/config.hpp"
#include "fbmr/errors.hpp"
#include "fbmr/harness.hpp"

using namespace fbmr;

namespace {

ExperimentConfig small(const std::string& experiment)
{
  ExperimentConfig c;
  c.experiment = experiment;
  c.n_values = {256};
  c.paths = 300;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("gaussian moments")
{
  CHECK(gaussian_moment(0) == 1.0);
  CHECK(gaussian_moment(3) == 0.0);
  CHECK(gaussian_moment(6) == 15.0);
  CHECK(gaussian_moment(10) == 945.0);
}

TEST_CASE("lemma names round-trip")
{
  for (auto k : {LemmaKind::L21a, LemmaKind::L21b, LemmaKind::L22_26, LemmaKind::L22_27, LemmaKind::L22_28,
                 LemmaKind::phi4moment})
    CHECK(lemma_from_string(to_string(k)) == k);
  CHECK_THROWS(lemma_from_string("L99"));
}

TEST_CASE("power sum experiment records")
{
  auto c = small("verify-clt");
  c.ell = 1;
  const auto report = power_sum_clt_experiment(c);
  CHECK(report.all_controls_pass());
  CHECK(report.contains("n=256/var_exact"));
  CHECK(report.find("n=256/var_exact").exact);
  for (const auto& r : report.records) CHECK((r.exact || r.standard_error.has_value()));
  CHECK_THROWS_AS(report.find("nope"), IndexError);

  c.hurst = 0.2;
  CHECK_THROWS_AS(power_sum_clt_experiment(c), ConfigError);
}

TEST_CASE("limit experiment degenerate derivative")
{
  auto c = small("verify-limit");
  c.function = FunctionFamily::monomial(2);
  const auto report = limit_law_experiment(c);
  CHECK(report.contains("n=256/t=1/chain_rule_exactness"));
  CHECK(report.find("n=256/t=1/chain_rule_exactness").pass.value());
}

TEST_CASE("limit experiment with trig function")
{
  auto c = small("verify-limit");
  c.function = FunctionFamily::trig(1, 1, 0);
  c.times = {0.5, 1.0};
  const auto report = limit_law_experiment(c);
  CHECK(report.all_controls_pass());
  CHECK(report.find("n=256/t=0.5/decomposition_identity").pass.value());
  CHECK(report.contains("n=256/t=1/var_phi_h2"));
}

TEST_CASE("residual experiment")
{
  auto c = small("verify-residual");
  c.function = FunctionFamily::trig(1, 1, 0);
  c.n_values = {64, 256};
  const auto report = residual_decay_experiment(c);
  CHECK(report.find("abs_residual_decreasing").pass.value());
  CHECK(report.find("n=64/markov_expected").estimate == doctest::Approx(15.0));
}

TEST_CASE("lemma scans")
{
  auto c = small("verify-lemmas");
  c.ell = 1;
  c.n_values = {64, 128};
  c.m_values = {4, 8};
  c.lemmas = {LemmaKind::L21a, LemmaKind::L22_28};
  const auto report = lemma_scan_experiment(c);
  CHECK(report.find("L21a/growth").pass.value());
  CHECK(report.find("L22_28/growth").pass.value());
  c.m_values = {128};
  CHECK_THROWS_AS(lemma_bound_scan(LemmaKind::L22_26, c), GridError);
}

TEST_CASE("riemann experiment and statistic selection")
{
  auto c = small("riemann");
  c.statistics = {"mean_residual"};
  const auto report = riemann_experiment(c);
  for (const auto& r : report.records)
    if (!r.control) CHECK(r.name.ends_with("mean_residual"));
  CHECK_FALSE(report.records.empty());
}

TEST_CASE("thread count does not change results")
{
  auto c = small("verify-clt");
  c.ell = 1;
  c.threads = 1;
  const auto a = power_sum_clt_experiment(c);
  c.threads = 5;
  const auto b = power_sum_clt_experiment(c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].estimate == b.records[i].estimate);
}

}

TEST_SUITE("config") {

nlohmann::json base()
{
  return nlohmann::json{{"schema_version", 1}, {"ell", 1}, {"n", {512}}, {"paths", 200}};
}

TEST_CASE("parse and echo")
{
  auto doc = base();
  doc["measure"] = {{0.0, 0.5}, {1.0, 0.5}};
  doc["function"] = "sin";
  const auto c = parse_config(doc, "verify-clt");
  CHECK(c.ell == 1);
  CHECK(c.n_values == std::vector<long>{512});
  CHECK(ell_of(c.measure).value == 1);
  CHECK(c.function.kind() == FunctionFamily::Kind::trig);
  const auto echo = config_to_json(c);
  CHECK_FALSE(echo.contains("threads"));
  const auto again = parse_config(nlohmann::json::parse(echo.dump()), "verify-clt");
  CHECK(config_to_json(again).dump() == echo.dump());
}

TEST_CASE("structural errors")
{
  auto doc = base();
  doc["colour"] = "red";
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
  doc = base();
  doc["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
  doc = base();
  doc["measure"] = {{0.3, 1.0}};
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
  doc = base();
  doc["method"] = "fft";
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
  doc = base();
  doc["experiment"] = "verify-limit";
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
  doc = base();
  doc.erase("schema_version");
  CHECK_THROWS_AS(parse_config(doc, "verify-clt"), ConfigError);
}

TEST_CASE("cross-field diagnostics")
{
  auto doc = base();
  CHECK(config_diagnostics(parse_config(doc, "verify-clt")).empty());

  doc["hurst"] = 0.2;
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-clt")).empty());

  doc = base();
  doc["m"] = {512};
  auto d = config_diagnostics(parse_config(doc, "verify-lemmas"));
  REQUIRE_FALSE(d.empty());
  CHECK(d.front().find("GridError") != std::string::npos);

  doc = base();
  doc["function"] = {{"kind", "monomial"}, {"degree", 2}};
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-limit")).empty());

  doc = base();
  doc["measure"] = "lebesgue";
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-limit")).empty());

  doc = base();
  doc["paths"] = 50;
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-clt")).empty());

  doc = base();
  doc["method"] = "cholesky";
  doc["n"] = {16384};
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-clt")).empty());

  doc = base();
  doc["function"] = {{"kind", "trig"}, {"max_derivative_order", 3}};
  CHECK_FALSE(config_diagnostics(parse_config(doc, "verify-limit")).empty());
}

}

TEST_SUITE("config") {

TEST_CASE("default function follows ell")
{
  const auto simpson = parse_config(nlohmann::json{{"schema_version", 1}, {"measure", "simpson"}}, "verify-limit");
  CHECK(simpson.function.degree() == 5);
  const auto trap = parse_config(nlohmann::json{{"schema_version", 1}}, "verify-limit");
  CHECK(trap.function.degree() == 3);
}

}
