// SPDX-License-Identifier: Apache-2.0
#include "emovec/backend.hpp"

#include <algorithm>
#include <cmath>

#include "emovec/errors.hpp"

namespace emovec {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw ValidationError("softmax: empty logit vector");
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(max_logit)) {
    throw BackendError("softmax: non-finite logit");
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (double& p : out) {
    p /= sum;
  }
  return out;
}

void check_context(const BackendDescriptor& d, std::span<const TokenId> context) {
  if (context.empty()) {
    throw ValidationError("empty token context");
  }
  if (context.size() > d.max_context) {
    throw ContextTooLongError("context of " + std::to_string(context.size()) +
                              " tokens exceeds max_context " + std::to_string(d.max_context) +
                              " of backend " + d.name);
  }
  for (TokenId t : context) {
    if (t < 0 || static_cast<std::size_t>(t) >= d.vocab_size) {
      throw ValidationError("token id " + std::to_string(t) + " outside vocabulary of size " +
                            std::to_string(d.vocab_size));
    }
  }
}

void check_distribution(std::span<const double> probs, std::size_t vocab_size, double tolerance) {
  if (probs.size() != vocab_size) {
    throw MalformedResponseError("distribution has " + std::to_string(probs.size()) +
                                 " entries, expected " + std::to_string(vocab_size));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ProtocolError("distribution entry is negative or non-finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw ProtocolError("distribution sums to " + std::to_string(sum));
  }
}

}  // namespace emovec
