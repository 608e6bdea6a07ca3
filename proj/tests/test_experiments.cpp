#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "wrg/experiments.hpp"

using namespace wrg;

namespace {

std::string csv_of(const RunResult& r) {
  std::ostringstream os;
  write_csv(os, r.records);
  return os.str();
}

double measure(const TrialRecord& r, const std::string& key) {
  const auto* v = detail::find(r.measures, key);
  EXPECT_NE(v, nullptr) << key;
  return v ? detail::numeric(*v).value_or(std::nan("")) : std::nan("");
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Config, UnknownKeyIsNamed) {
  try {
    parse_config_text(R"({"kind": "transition", "n": [100], "d": 3, "alpha": 1, "trails": 3})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("trails"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("{not json"), Error);
  EXPECT_THROW(parse_config_text(R"({"kind": "spectrum"})"), Error);
  EXPECT_THROW(parse_config_text(R"({"kind": "lln", "n": ["many"]})"), Error);
}

TEST(Config, ScalarsBecomeOneElementGrids) {
  const auto c = parse_config_text(R"({"kind": "lln", "n": 1000, "d": [3], "alpha": 1.5, "master_seed": 7})");
  EXPECT_EQ(c.n, (std::vector<std::int64_t>{1000}));
  EXPECT_EQ(c.alpha, (std::vector<double>{1.5}));
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_TRUE(validate(c).empty());
}

TEST(Validate, Examples) {
  const auto g = validate(parse_config_text(R"({"kind": "variational", "d": 3, "L": [1, 2], "gamma": [0.4, 1]})"));
  EXPECT_TRUE(mentions(g, "gamma must exceed 1/2"));
  const auto odd = validate(parse_config_text(R"({"kind": "transition", "n": [101], "d": 3, "alpha": 1})"));
  EXPECT_TRUE(mentions(odd, "n*d must be even"));
  const auto empty = validate(parse_config_text(R"({"kind": "transition", "n": [], "d": 3, "alpha": []})"));
  EXPECT_TRUE(mentions(empty, "grid 'n' is empty"));
  EXPECT_TRUE(mentions(empty, "grid 'alpha' is empty"));
  EXPECT_TRUE(mentions(validate(parse_config_text(R"({"kind": "tailbound", "m": 2, "b": 2, "L": [2], "alpha": 1})")),
                       "threshold L must exceed m"));
  EXPECT_THROW(run(parse_config_text(R"({"kind": "transition", "n": [101], "d": 3, "alpha": 1})")), Error);
}

TEST(Run, TransitionRowAccounting) {
  const auto c = parse_config_text(
      R"({"kind": "transition", "n": [200, 400, 800], "d": 3, "alpha": [1, 4], "trials": 4, "master_seed": 3})");
  const auto r = run(c);
  ASSERT_EQ(r.records.size(), 24u);
  EXPECT_EQ(lines(csv_of(r)), 25u);
  EXPECT_EQ(r.summary["groups"].size(), 6u);
  EXPECT_EQ(r.summary["rows"], 24);
  EXPECT_EQ(r.summary["schema_version"], kSchemaVersion);
  EXPECT_EQ(r.summary["config"]["trials"], 4);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.seed, derive_seed(3, rec.grid, rec.trial));
    const auto* ok = detail::find(rec.measures, "max_entry_ok");
    ASSERT_NE(ok, nullptr);
    EXPECT_EQ(*ok, Value(true));
  }
  EXPECT_TRUE(csv_of(r).rfind("schema_version,kind,grid,trial,seed,", 0) == 0);
}

TEST(Run, VariationalGammaOneIsClosedForm) {
  const auto r = run(parse_config_text(R"({"kind": "variational", "d": 3, "gamma": 1, "L": [1, 2, 3, 4, 5]})"));
  ASSERT_EQ(r.records.size(), 5u);
  for (const auto& rec : r.records) EXPECT_NEAR(measure(rec, "value"), 0.7071068, 1e-6);
  EXPECT_TRUE(r.all_checks_passed());
}

TEST(Run, OutputIsIndependentOfThreadCountAndRepeatable) {
  const std::string configs[] = {
      R"({"kind": "localization", "n": [2000], "d": 3, "alpha": [0.5, 1, 3], "eps": 0.1, "trials": 3, "master_seed": 11})",
      R"({"kind": "shattering", "n": [5000], "d": 3, "b_scale": [0.34], "trials": 5})",
      R"({"kind": "census", "n": [1000, 2000], "d": [3, 4], "trials": 2})",
      R"({"kind": "tailbound", "alpha": [1], "m": [1, 2], "b": [2], "L_offset": [1, 3], "samples": 20000})",
      R"({"kind": "variational", "d": 3, "alpha": [3, 4], "L": [1, 2, 3]})"};
  for (const auto& text : configs) {
    const auto c = parse_config_text(text);
    const auto one = run(c, 1), two = run(c, 2), again = run(c, 2);
    EXPECT_EQ(csv_of(one), csv_of(two)) << text;
    EXPECT_EQ(csv_of(two), csv_of(again)) << text;
    EXPECT_EQ(one.summary.dump(), two.summary.dump()) << text;
    // Dominance is a large-n statistical statement; every other check is exact here.
    for (const auto& ch : one.checks)
      if (ch.name.rfind("heavy_component_dominance", 0) != 0) {
        EXPECT_TRUE(ch.passed) << ch.name << ": " << ch.detail;
      }
  }
}

TEST(Run, TimingOnlyEntersSummaryOnRequest) {
  auto c = parse_config_text(R"({"kind": "census", "n": [500], "d": 3, "trials": 2, "output": {"timing": true}})");
  const auto r = run(c);
  EXPECT_TRUE(r.summary["groups"][0].contains("wall_seconds"));
  EXPECT_EQ(csv_of(r).find("second"), std::string::npos);
  c.timing = false;
  EXPECT_FALSE(run(c).summary["groups"][0].contains("wall_seconds"));
}

TEST(Run, TailboundRecordsAgreeWithBound) {
  const auto r = run(parse_config_text(
      R"({"kind": "tailbound", "alpha": [0.5], "m": [1, 2], "b": [2, 4], "L_offset": [1, 4], "samples": 50000})"));
  ASSERT_EQ(r.records.size(), 8u);
  for (const auto& rec : r.records) {
    EXPECT_LE(measure(rec, "ci_high"), measure(rec, "bound"));
    EXPECT_EQ(measure(rec, "samples"), 50000.0);
  }
}
