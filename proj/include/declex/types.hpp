// declex/types.hpp

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

#ifndef DECLEX_TYPES_HPP_
#define DECLEX_TYPES_HPP_

#include <cstdint>

namespace declex {

using WordId = std::int32_t;
using ClassId = std::int32_t;

constexpr WordId kInvalidWord = -1;

/// Unlimited sentinel for beam sizes (histogram / preselection).
constexpr int kUnlimited = -1;

inline bool is_limited(int beam) { return beam != kUnlimited; }

}  // namespace declex

#endif  // DECLEX_TYPES_HPP_
