// Copyright 2026 The SSGC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSGC_TESTS_FIXTURES_H_
#define SSGC_TESTS_FIXTURES_H_

#include <string>

#include "ssgc/corpus.h"

namespace ssgc::testing {

// "Nadine likes tea . / She drinks it every day ." with clusters
// {Nadine, She}, {tea, it} and frames like(ARG0, ARG1) and
// drink(ARG0, ARG1, ARGM-TMP).
inline const std::string kNadineJsonl =
    R"({"id":"nadine","sentences":[["Nadine","likes","tea","."],["She","drinks","it","every","day","."]],)"
    R"("clusters":[[[0,0],[4,4]],[[2,2],[6,6]]],)"
    R"("frames":[{"predicate":[1,1],"args":[{"role":"ARG0","span":[0,0]},{"role":"ARG1","span":[2,2]}]},)"
    R"({"predicate":[5,5],"args":[{"role":"ARG0","span":[4,4]},{"role":"ARG1","span":[6,6]},{"role":"ARGM-TMP","span":[7,8]}]}]})"
    "\n";

inline const std::string kNadineColumns =
    "#begin document nadine\n"
    "Nadine\t-\tB-ARG0\t(0)\n"
    "likes\tlike\tB-V\t-\n"
    "tea\t-\tB-ARG1\t(1)\n"
    ".\t-\tO\t-\n"
    "\n"
    "She\t-\tB-ARG0\t(0)\n"
    "drinks\tdrink\tB-V\t-\n"
    "it\t-\tB-ARG1\t(1)\n"
    "every\t-\tB-ARGM-TMP\t-\n"
    "day\t-\tI-ARGM-TMP\t-\n"
    ".\t-\tO\t-\n"
    "\n"
    "#end document\n";

inline Document NadineDocument() { return ParseJsonlString(kNadineJsonl).at(0); }

}  // namespace ssgc::testing

#endif  // SSGC_TESTS_FIXTURES_H_
