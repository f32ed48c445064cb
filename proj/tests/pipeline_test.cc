#include "lrpop/pipeline.h"

#include <cmath>

#include <gtest/gtest.h>

#include "lrpop/cp_json.h"
#include "lrpop/errors.h"
#include "test_util.h"

namespace lrpop {
namespace {

CPPoly FiveVar() { return read_cp_file(test::data_path("five_var_r2.json")); }

PipelineOptions Order(int k) {
  PipelineOptions o;
  o.order = k;
  o.solver.tol = 1e-7;
  return o;
}

TEST(PipelineTest, ExampleIsSound) {
  const CPPoly f = FiveVar();
  const RunReport r = solve_cp(f, Order(3), describe(f, "five_var_r2.json"));
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  ASSERT_TRUE(r.lower_bound && r.upper_bound);
  EXPECT_LE(*r.lower_bound, test::sample_min(f, 10000, 2) + 1e-6);
  EXPECT_NEAR(*r.lower_bound, -180.0, 1e-3);
  EXPECT_GE(*r.upper_bound, *r.lower_bound - 1e-6);
  EXPECT_EQ(r.point.size(), 5u);
  ASSERT_TRUE(r.complexity.has_value());
  EXPECT_TRUE(r.complexity->within_bounds());
  EXPECT_EQ(r.instance.n, 5);
  EXPECT_EQ(r.instance.r, 2);
  EXPECT_EQ(r.instance.d, 1);
  EXPECT_EQ(r.order, 3);
}

TEST(PipelineTest, BernsteinFixture) {
  const CPPoly f = read_cp_file(test::data_path("bernstein_r2_n10.json"));
  const RunReport r = solve_cp(f, Order(2), describe(f, "bernstein"));
  ASSERT_TRUE(r.lower_bound.has_value());
  EXPECT_NEAR(*r.lower_bound, 2.0, 1e-3);
  for (double x : r.point) EXPECT_NEAR(x, -1.0, 0.05);
  EXPECT_NEAR(*r.upper_bound, 2.0, 0.02);
}

TEST(PipelineTest, MinimalOrderDefault) {
  const CPPoly f = gen_monomial_instance(3, 3, 1, 5);
  const RunReport r = solve_cp(f, Order(0), describe(f, "x"));
  EXPECT_EQ(r.order, 2);
}

TEST(PipelineTest, OrderTooSmall) {
  const CPPoly f = gen_monomial_instance(3, 3, 1, 5);
  EXPECT_THROW(solve_cp(f, Order(1), describe(f, "x")), OrderTooSmall);
  PipelineOptions strict = Order(2);
  strict.strict_degree = true;
  EXPECT_THROW(solve_cp(f, strict, describe(f, "x")), OrderTooSmall);
  EXPECT_THROW(solve_dense(f, Order(2), describe(f, "x")), OrderTooSmall);
}

TEST(PipelineTest, DenseAgreesWithLowRank) {
  const CPPoly f = gen_monomial_instance(3, 2, 2, 12);
  const RunReport lr = solve_cp(f, Order(3), describe(f, "x"));
  const RunReport dense = solve_dense(f, Order(0), describe(f, "x"));
  ASSERT_EQ(lr.status, SolveStatus::Optimal);
  ASSERT_EQ(dense.status, SolveStatus::Optimal);
  EXPECT_EQ(dense.order, 3);
  EXPECT_FALSE(dense.complexity.has_value());
  EXPECT_NEAR(*lr.lower_bound, *dense.lower_bound, 1e-4);
  EXPECT_LE(*dense.lower_bound, test::grid_min(f) + 1e-6);
}

TEST(PipelineTest, TBoundsStayValid) {
  const CPPoly f = gen_monomial_instance(3, 2, 1, 1006);
  PipelineOptions o = Order(3);
  o.t_bounds = true;
  const RunReport r = solve_cp(f, o, describe(f, "x"));
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_TRUE(r.t_bounds);
  EXPECT_LE(*r.lower_bound, test::grid_min(f) + 1e-6);
}

TEST(PipelineTest, RescalingKeepsTheValue) {
  const CPPoly f = gen_monomial_instance(3, 2, 2, 12);
  PipelineOptions raw = Order(3);
  raw.rescale = false;
  const RunReport a = solve_cp(f, Order(3), describe(f, "x"));
  const RunReport b = solve_cp(f, raw, describe(f, "x"));
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  ASSERT_EQ(b.status, SolveStatus::Optimal);
  EXPECT_EQ(a.y_count, b.y_count);
  EXPECT_EQ(a.equality_count, b.equality_count);
  EXPECT_NEAR(*a.lower_bound, *b.lower_bound, 1e-6);
}

TEST(PipelineTest, DeadlineGivesTimeLimit) {
  const CPPoly f = gen_bernstein_instance(30, 2, 2, 1.0, 1);
  PipelineOptions o = Order(2);
  o.solver.deadline = std::chrono::steady_clock::now();
  const RunReport r = solve_cp(f, o, describe(f, "x"));
  EXPECT_EQ(r.status, SolveStatus::TimeLimit);
  EXPECT_FALSE(r.lower_bound.has_value());
}

RunReport SampleReport() {
  const CPPoly f = gen_bernstein_instance(4, 2, 2, 1.0, 9);
  InstanceInfo info = describe(f, "bernstein");
  info.seed = 18446744073709551615ULL;
  info.delta = 0.1;
  return solve_cp(f, Order(2), info);
}

TEST(RunReportTest, RoundTripIsByteIdentical) {
  const RunReport r = SampleReport();
  const std::string text = serialize_report(r);
  const RunReport back = parse_report(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(serialize_report(back), text);
  // Parse then serialize of a document we did not write ourselves.
  EXPECT_EQ(serialize_report(parse_report(text)), text);
}

TEST(RunReportTest, RoundTripWithAbsentFields) {
  RunReport r;
  r.instance.source = "file \"quoted\" \\ path";
  r.status = SolveStatus::TimeLimit;
  r.message = "deadline";
  r.method = Method::Dense;
  r.wall_time_seconds = 0.1 + 0.2;
  r.tol = 1e-7;
  const std::string text = serialize_report(r);
  EXPECT_EQ(parse_report(text), r);
  EXPECT_EQ(serialize_report(parse_report(text)), text);
}

TEST(RunReportTest, RoundTripRandomValues) {
  PortableRng rng(77);
  RunReport r = SampleReport();
  for (int trial = 0; trial < 200; ++trial) {
    r.lower_bound = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
    r.upper_bound = rng.uniform();
    r.wall_time_seconds = rng.uniform(0, 1000);
    r.gap = std::ldexp(rng.uniform(), -1060);  // subnormal
    r.point = {rng.normal(), -0.0, 1e-320};
    const std::string text = serialize_report(r);
    ASSERT_EQ(serialize_report(parse_report(text)), text);
    ASSERT_EQ(parse_report(text), r);
  }
}

TEST(RunReportTest, RejectsUnknownAndMissingFields) {
  nlohmann::json doc = report_to_json(SampleReport());
  doc["extra"] = true;
  EXPECT_THROW(report_from_json(doc), InvalidInput);
  doc = report_to_json(SampleReport());
  doc["instance"]["colour"] = "red";
  EXPECT_THROW(report_from_json(doc), InvalidInput);
  doc = report_to_json(SampleReport());
  doc.erase("status");
  EXPECT_THROW(report_from_json(doc), InvalidInput);
  doc = report_to_json(SampleReport());
  doc["status"] = "fine";
  EXPECT_THROW(report_from_json(doc), InvalidInput);
  EXPECT_THROW(parse_report("{not json"), InvalidInput);
}

TEST(RunReportTest, FormatMentionsEssentials) {
  const std::string text = format_report(SampleReport());
  EXPECT_NE(text.find("lower bound"), std::string::npos);
  EXPECT_NE(text.find("optimal"), std::string::npos);
}

}  // namespace
}  // namespace lrpop
