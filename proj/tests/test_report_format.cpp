#include <gtest/gtest.h>

#include <json.hpp>

#include "core/error.hpp"
#include "core/model_zoo.hpp"
#include "core/report_format.hpp"

using namespace dslr;
using namespace dslr::report;

namespace {
perf::PerfReport alexnet(bool baseline) {
  perf::ReportOptions o;
  o.include_baseline = baseline;
  return perf::build_report(zoo::builtin("alexnet"), o);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (b < s.size()) {
    const auto e = s.find('\n', b);
    out.push_back(s.substr(b, e - b));
    b = e + 1;
  }
  return out;
}

int significant_digits(const std::string& s) {
  int n = 0;
  bool leading = true;
  for (char c : s) {
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++n;
  }
  return n;
}
}  // namespace

TEST(Decimal, NoExponentAndEnoughDigits) {
  for (double v : {0.0, 1.0, 0.058752, 3.585e-9, 12345678901.5, -0.25, 1755.4285714}) {
    const std::string s = decimal(v);
    EXPECT_EQ(s.find_first_of("eE"), std::string::npos) << s;
    if (v != 0) EXPECT_GE(significant_digits(s), 6) << s;
    EXPECT_NEAR(std::stod(s), v, std::abs(v) * 1e-8) << s;
  }
  EXPECT_EQ(decimal(-0.0), decimal(0.0));
}

TEST(Render, CsvLayout) {
  const auto ls = lines(render_report(alexnet(true), Format::Csv));
  EXPECT_EQ(ls[0], "design,layer,cycles,duration_ms,ops,gops,tops_per_w,gops_per_mm2,oi");
  EXPECT_EQ(ls[1].rfind("dslr,C1,29376,0.0587520000,210830400,", 0), 0u) << ls[1];
  EXPECT_EQ(ls[6].rfind("baseline,C1,42048,", 0), 0u);
  EXPECT_EQ(ls[11], "");
  EXPECT_EQ(ls[12].rfind("aggregate,design,total_cycles", 0), 0u);
  EXPECT_EQ(ls[13].rfind("aggregate,dslr,471744,0.943488000,", 0), 0u) << ls[13];
  EXPECT_EQ(ls.back().rfind("speedup,total,1.63247863", 0), 0u) << ls.back();
}

TEST(Render, JsonParsesAndMatches) {
  const auto rep = alexnet(true);
  const auto j = nlohmann::json::parse(render_report(rep, Format::Json));
  EXPECT_EQ(j["network"], "alexnet");
  ASSERT_EQ(j["designs"].size(), 2u);
  EXPECT_EQ(j["designs"][0]["layers"][0]["cycles"], 29376);
  EXPECT_DOUBLE_EQ(j["designs"][0]["aggregate"]["total_ms"].get<double>(), 0.943488);
  EXPECT_NEAR(j["speedup"]["total"].get<double>(), *rep.speedup, 1e-8);
}

TEST(Render, CompareAndRoofline) {
  std::vector<perf::PerfReport> reps{alexnet(true)};
  const auto cmp = lines(render_compare(reps, Format::Csv));
  EXPECT_EQ(cmp.size(), 2u);
  EXPECT_EQ(cmp[1].rfind("alexnet,0.943488000,1.54022400,", 0), 0u) << cmp[1];
  EXPECT_THROW(render_compare({alexnet(false)}, Format::Csv), Error);

  const auto roof = lines(render_roofline(alexnet(true), Format::Csv));
  EXPECT_EQ(roof[0], "design,layer,oi,gops");
  EXPECT_EQ(roof.size(), 11u);
  const auto j = nlohmann::json::parse(render_roofline(alexnet(false), Format::Json));
  EXPECT_EQ(j["series"].size(), 1u);
  EXPECT_EQ(j["series"][0]["points"].size(), 5u);
}

TEST(Render, Deterministic) {
  EXPECT_EQ(render_report(alexnet(true), Format::Json), render_report(alexnet(true), Format::Json));
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  EXPECT_EQ(parse_format("json"), Format::Json);
  EXPECT_THROW(parse_format("xml"), Error);
}
