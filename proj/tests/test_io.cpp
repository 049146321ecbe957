#include <gtest/gtest.h>

#include <sstream>

#include "exclab/io.hpp"

using namespace exclab;

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(io::format12(1.0), "1");
  EXPECT_EQ(io::format12(0.1 + 0.2), "0.3");
  EXPECT_EQ(io::format12(3.6052562201571366), "3.60525622016");
  EXPECT_DOUBLE_EQ(io::round12(0.031133143559462441), 0.0311331435595);
}

TEST(BoundsCsv, HeaderAndRows) {
  std::ostringstream empty;
  io::write_bounds_csv(empty, {});
  EXPECT_EQ(empty.str(), "n,m,gamma_log2,classical_ic_lower,quantum_entropy_upper,quantum_ic_upper\n");

  std::ostringstream out;
  io::write_bounds_csv(out, bounds::separation_table({3, 8}, bounds::MRule::fixed(2)));
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line, "3,2,2,1,1.80262811008,3.60525622016");
  std::getline(lines, line);
  EXPECT_EQ(line.substr(0, 4), "8,2,");
  EXPECT_FALSE(std::getline(lines, line));
}

TEST(BoundsJson, CarriesSchemaVersion) {
  const auto rule = bounds::MRule::power(0.75);
  const auto j = io::bounds_json(bounds::separation_table({1000}, rule), rule);
  EXPECT_EQ(j["schema_version"], io::kSchemaVersion);
  EXPECT_EQ(j["kind"], "bounds_table");
  EXPECT_EQ(j["rows"][0]["m"], 177);
  EXPECT_EQ(j["columns"].size(), 6U);
}

TEST(Transcripts, OneJsonObjectPerLine) {
  game::GameConfig c;
  c.n = 4;
  c.m = 2;
  c.strategy = game::Strategy::entanglement_assisted;
  c.trials = 50;
  c.seed = 3;
  c.delta = 0.2;
  c.k = 2;
  const auto r = game::monte_carlo(c, 1, true);
  std::ostringstream out;
  io::write_transcripts(out, r.transcripts);
  std::istringstream in(out.str());
  std::string line;
  std::size_t count = 0;
  std::size_t aborted = 0;
  while (std::getline(in, line)) {
    const auto j = io::Json::parse(line);
    ASSERT_TRUE(j.contains("x") && j.contains("y") && j.contains("message") && j.contains("won"));
    EXPECT_EQ(j["x"].get<std::string>().size(), 4U);
    if (j["aborted"].get<bool>()) {
      ++aborted;
      EXPECT_TRUE(j["answer"].is_null());
      EXPECT_TRUE(j["message"]["abort"].get<bool>());
    } else {
      EXPECT_TRUE(j["won"].get<bool>());
    }
    ++count;
  }
  EXPECT_EQ(count, 50U);
  EXPECT_EQ(aborted, r.stats.aborts);
}

TEST(RunStatisticsJson, Fields) {
  game::GameConfig c;
  c.n = 4;
  c.m = 2;
  c.strategy = game::Strategy::classical_cover;
  c.trials = 100;
  c.seed = 1;
  const auto j = io::to_json(game::monte_carlo(c).stats);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["strategy"], "classical_cover");
  EXPECT_EQ(j["wins"], 100);
  EXPECT_TRUE(j["zero_error"].get<bool>());
  EXPECT_TRUE(j["k"].is_null());
  EXPECT_TRUE(j["empirical_conditional_entropy"].is_number());
}

TEST(AnswerSetJson, RoundTrip) {
  const auto a = classical::consistent_answer_set(BitString::parse("1011"), 2);
  const auto j = io::to_json(a);
  EXPECT_EQ(j["answers"].size(), 6U);
  EXPECT_EQ(j["answers"][0]["y"], (std::vector<int>{1, 2}));
  EXPECT_EQ(j["answers"][0]["z"], "10");
  EXPECT_EQ(io::answer_set_from_json(j), a);
  auto broken = j;
  broken["answers"][1] = broken["answers"][0];
  EXPECT_THROW(io::answer_set_from_json(broken), UsageError);
}
