// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pdbmine/geometry.hpp"
#include "pdbmine/kde_predictor.hpp"
#include "pdbmine/torsion_store.hpp"

namespace {

using namespace pdbmine;

std::string random_sequence(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> letter(0, 19);
  std::string s(n, 'A');
  for (char& c : s) c = kStandardAlphabet[letter(rng)];
  return s;
}

// About 200k residues, the size of a modest desk corpus.
const TorsionStore& corpus_store() {
  static const TorsionStore store = [] {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> length(50, 350);
    std::vector<StoredChain> chains;
    for (int i = 0; i < 1000; ++i) {
      StoredChain c;
      c.structure_id = std::to_string(1000 + i);
      c.chain = 'A';
      c.sequence = random_sequence(rng, length(rng));
      c.phi.assign(c.size(), -60.0f);
      c.psi.assign(c.size(), -45.0f);
      c.omega.assign(c.size(), 180.0f);
      chains.push_back(std::move(c));
    }
    return TorsionStore::from_chains(std::move(chains));
  }();
  return store;
}

void BM_Torsion(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Vec3> p(4096);
  for (auto& v : p) v = {u(rng), u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(torsion(p[i], p[i + 1], p[i + 2], p[i + 3]));
    i = (i + 4) % (p.size() - 4);
  }
}
BENCHMARK(BM_Torsion);

void BM_FindKmer(benchmark::State& state) {
  const TorsionStore& store = corpus_store();
  std::mt19937_64 rng(2);
  std::vector<std::string> queries;
  for (int i = 0; i < 64; ++i) queries.push_back(random_sequence(rng, static_cast<std::size_t>(state.range(0))));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.find_kmer(queries[i++ % queries.size()]));
  }
}
BENCHMARK(BM_FindKmer)->Arg(1)->Arg(2)->Arg(3)->Arg(5)->Arg(7);

void BM_EstimateDensity(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 20.0);
  std::vector<AnglePair> obs;
  for (int i = 0; i < state.range(0); ++i) obs.push_back({wrap_degrees(-63 + g(rng)), wrap_degrees(-42 + g(rng))});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_density(obs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateDensity)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BuildBackbone(benchmark::State& state) {
  std::vector<TorsionTriple> angles(static_cast<std::size_t>(state.range(0)), TorsionTriple{-63.0, -42.0, 180.0});
  for (auto _ : state) benchmark::DoNotOptimize(build_backbone(angles));
}
BENCHMARK(BM_BuildBackbone)->Arg(76)->Arg(1000);

void BM_KabschRmsd(benchmark::State& state) {
  std::vector<TorsionTriple> a(static_cast<std::size_t>(state.range(0)), TorsionTriple{-63.0, -42.0, 180.0});
  std::vector<TorsionTriple> b(a.size(), TorsionTriple{-120.0, 130.0, 180.0});
  const auto pa = build_backbone(a).atoms();
  const auto pb = build_backbone(b).atoms();
  for (auto _ : state) benchmark::DoNotOptimize(kabsch_rmsd(pa, pb));
}
BENCHMARK(BM_KabschRmsd)->Arg(76)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
