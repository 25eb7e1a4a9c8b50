#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sensemt/io.hpp"
#include "sensemt/stats.hpp"
#include "sensemt/text.hpp"

#include <cmath>

using namespace sensemt;
using namespace sensemt::testing;

namespace {

struct Columns {
  std::vector<std::string> x_text;
  std::vector<std::string> y_text;
  std::vector<double> x;
  std::vector<double> y;
};

Columns load_pearson20() {
  Columns c;
  const auto lines = io::split_lines(io::read_file(std::string(SENSEMT_TEST_DATA) + "/fixtures/pearson20.tsv"));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = text::split(lines[i], '\t');
    c.x_text.emplace_back(f[0]);
    c.y_text.emplace_back(f[1]);
    c.x.push_back(std::stod(std::string(f[0])));
    c.y.push_back(std::stod(std::string(f[1])));
  }
  return c;
}

}  // namespace

TEST(IncompleteBeta, MatchesHighPrecisionOracle) {
  for (double a : {0.5, 1.0, 2.5, 9.0, 40.0})
    for (double b : {0.5, 1.0, 3.0})
      for (double x : {0.001, 0.1, 0.37, 0.5, 0.8, 0.999})
        EXPECT_NEAR(stats::incomplete_beta(a, b, x), ibeta_oracle(a, b, x), 1e-12) << a << " " << b << " " << x;
  EXPECT_EQ(stats::incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(2, 3, 1.0), 1.0);
  EXPECT_THROW(stats::incomplete_beta(0, 1, 0.5), Error);
}

TEST(StudentT, KnownQuantiles) {
  // t = 2.228 is the two-sided 5% critical value for 10 degrees of freedom.
  EXPECT_NEAR(stats::student_t_two_sided(2.228138851986, 10), 0.05, 1e-9);
  EXPECT_NEAR(stats::student_t_two_sided(0.0, 5), 1.0, 1e-15);
}

TEST(Pearson, PerfectLinear) {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const auto r = stats::pearson(x, y);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);
  EXPECT_EQ(r.p_value, 0.0);
  std::vector<double> neg;
  for (double v : x) neg.push_back(-3 * v);
  EXPECT_NEAR(stats::pearson(x, neg).rho, -1.0, 1e-12);
}

TEST(Pearson, Symmetric) {
  const auto c = load_pearson20();
  const auto a = stats::pearson(c.x, c.y);
  const auto b = stats::pearson(c.y, c.x);
  EXPECT_DOUBLE_EQ(a.rho, b.rho);
  EXPECT_DOUBLE_EQ(a.p_value, b.p_value);
}

TEST(Pearson, FixtureMatchesOracle) {
  const auto c = load_pearson20();
  ASSERT_EQ(c.x.size(), 20u);
  const auto got = stats::pearson(c.x, c.y);
  const auto want = pearson_oracle(c.x_text, c.y_text);
  EXPECT_NEAR(got.rho, want.rho, 1e-9);
  EXPECT_NEAR(got.p_value, want.p_value, 1e-9);
  EXPECT_EQ(got.n, 20u);
}

TEST(Pearson, RejectsDegenerateInput) {
  std::vector<double> x{1, 2, 3};
  std::vector<double> k{4, 4, 4};
  EXPECT_THROW(stats::pearson(x, k), Error);
  EXPECT_THROW(stats::pearson(k, x), Error);
  EXPECT_THROW(stats::pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(stats::pearson(x, std::vector<double>{1, 2}), Error);
}
