#include "oracles.hpp"

#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace sensemt::testing {

using Big = boost::multiprecision::cpp_bin_float_50;

PearsonOracle pearson_oracle(const std::vector<std::string>& xs, const std::vector<std::string>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw std::invalid_argument("pearson_oracle: bad sizes");
  const auto n = xs.size();
  std::vector<Big> x;
  std::vector<Big> y;
  for (std::size_t i = 0; i < n; ++i) {
    x.emplace_back(xs[i]);
    y.emplace_back(ys[i]);
  }
  Big mx = 0;
  Big my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Big sxx = 0;
  Big syy = 0;
  Big sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const Big rho = sxy / sqrt(sxx * syy);
  // Two-sided p of t = rho*sqrt(df/(1-rho^2)) with df = n-2 degrees of freedom:
  // p = I_{df/(df+t^2)}(df/2, 1/2).
  const Big df = n - 2;
  const Big t = rho * sqrt(df / (1 - rho * rho));
  const Big p = boost::math::ibeta(df / 2, Big(0.5), df / (df + t * t));
  return {rho.convert_to<double>(), p.convert_to<double>()};
}

double ibeta_oracle(double a, double b, double x) {
  return boost::math::ibeta(Big(a), Big(b), Big(x)).convert_to<double>();
}

namespace {

// Sum over ordered category sequences of their probability times the
// outcome: the first slot holding the query's lemma decides.
double enumerate(std::size_t same, std::size_t other, std::size_t rest, std::size_t slots, bool mfs_correct) {
  if (slots == 0 || same + other + rest == 0) return mfs_correct ? 1.0 : 0.0;
  const double total = static_cast<double>(same + other + rest);
  double p = 0.0;
  if (same > 0) p += static_cast<double>(same) / total * 1.0;
  if (other > 0) p += static_cast<double>(other) / total * 0.0;
  if (rest > 0) p += static_cast<double>(rest) / total * enumerate(same, other, rest - 1, slots - 1, mfs_correct);
  return p;
}

}  // namespace

double random_demo_success_probability(const SyntheticWorld& world, const EvalItem& item, std::size_t k) {
  const auto& tok = item.ambiguous_token();
  const SyntheticWorld::Lemma* lemma = nullptr;
  for (const auto& L : world.lemmas)
    if (L.word == tok.lemma) lemma = &L;
  if (!lemma) throw std::invalid_argument("item lemma not in world");
  const bool is_mfs = tok.sense->str() == lemma->senses.front();

  std::size_t same = 0;
  std::size_t other = 0;
  std::size_t rest = 0;
  for (const auto& p : world.corpus) {
    if (p.id() == item.id) continue;  // the query never serves as its own demonstration
    bool has_lemma = false;
    bool has_sense = false;
    for (const auto& t : p.source.tokens) {
      if (t.lemma == tok.lemma) {
        has_lemma = true;
        has_sense = has_sense || (t.sense && *t.sense == *tok.sense);
      }
    }
    if (has_sense) ++same;
    else if (has_lemma) ++other;
    else ++rest;
  }
  return enumerate(same, other, rest, k, is_mfs);
}

double random_demo_expected_accuracy(const SyntheticWorld& world, std::size_t k) {
  double sum = 0.0;
  for (const auto& item : world.items) sum += random_demo_success_probability(world, item, k);
  return sum / static_cast<double>(world.items.size());
}

}  // namespace sensemt::testing
