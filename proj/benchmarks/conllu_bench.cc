// Copyright 2026 The corefpipe Authors.
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

#include <benchmark/benchmark.h>

#include <string>

#include "corefpipe/conllu.h"
#include "corefpipe/synthetic.h"

namespace corefpipe {
namespace {

void BM_ParseConllu(benchmark::State &state) {
  const std::string text = SerializeConllu(GenerateSynthetic("xa_syn", state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(ParseConllu(text));
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_ParseConllu)->Arg(1)->Arg(16);

void BM_SerializeConllu(benchmark::State &state) {
  const auto docs = GenerateSynthetic("xa_syn", state.range(0), 1);
  size_t bytes = 0;
  for (auto _ : state) {
    std::string text = SerializeConllu(docs);
    bytes += text.size();
    benchmark::DoNotOptimize(text);
  }
  state.SetBytesProcessed(bytes);
}
BENCHMARK(BM_SerializeConllu)->Arg(1)->Arg(16);

}  // namespace
}  // namespace corefpipe
