// declex/evaluation.cc

// Copyright 2026  The Declex Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "declex/evaluation.hpp"

#include <stdexcept>
#include <string>

namespace declex {

AccuracyResult token_accuracy(const Corpus& hyp, const Corpus& ref) {
  if (hyp.sentences.size() != ref.sentences.size())
    throw std::runtime_error(
        "token_accuracy: sentence count mismatch (hyp " +
        std::to_string(hyp.sentences.size()) + ", ref " +
        std::to_string(ref.sentences.size()) + ")");
  std::int64_t tokens = 0;
  std::int64_t matches = 0;
  for (std::size_t s = 0; s < hyp.sentences.size(); ++s) {
    const auto& h = hyp.sentences[s];
    const auto& r = ref.sentences[s];
    if (h.size() != r.size())
      throw std::runtime_error("token_accuracy: length mismatch in sentence " +
                               std::to_string(s) + " (hyp " +
                               std::to_string(h.size()) + ", ref " +
                               std::to_string(r.size()) + ")");
    for (std::size_t i = 0; i < h.size(); ++i) {
      ++tokens;
      if (h[i] == r[i]) ++matches;
    }
  }
  if (tokens == 0) return {1.0, 0};
  return {static_cast<double>(matches) / static_cast<double>(tokens), tokens};
}

}  // namespace declex
