// declex/evaluation.hpp

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

#ifndef DECLEX_EVALUATION_HPP_
#define DECLEX_EVALUATION_HPP_

#include <cstdint>

#include "declex/corpus.hpp"

namespace declex {

struct AccuracyResult {
  double accuracy = 0.0;
  std::int64_t tokens = 0;
};

/// Token-level accuracy: the fraction of positions where hypothesis and
/// reference ids match, pooled over all sentences.  Requires identical
/// sentence counts and per-sentence lengths; the error names the first
/// offending sentence.
AccuracyResult token_accuracy(const Corpus& hyp, const Corpus& ref);

}  // namespace declex

#endif  // DECLEX_EVALUATION_HPP_
