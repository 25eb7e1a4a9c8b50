#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fixtures.hpp"

namespace sensemt::testing {

struct PearsonOracle {
  double rho = 0.0;
  double p_value = 0.0;
};

/// Pearson rho and two-sided t-test p-value in 50-digit arithmetic. Inputs
/// are decimal strings so no binary rounding happens before the oracle.
PearsonOracle pearson_oracle(const std::vector<std::string>& x, const std::vector<std::string>& y);

/// Regularized incomplete beta in 50-digit arithmetic.
double ibeta_oracle(double a, double b, double x);

/// Probability that the copy-from-demo mock translates `item` correctly when
/// given `k` demonstrations drawn uniformly without replacement from the
/// world's corpus, by exhaustive enumeration over which sentence categories
/// (same lemma and sense / same lemma other sense / other lemma) fill each
/// demonstration slot.
double random_demo_success_probability(const SyntheticWorld& world, const EvalItem& item, std::size_t k);

/// Mean of the above over all eval items: the expected exclude-policy
/// accuracy of random k-shot prompting (the mock never produces a Miss).
double random_demo_expected_accuracy(const SyntheticWorld& world, std::size_t k);

}  // namespace sensemt::testing
