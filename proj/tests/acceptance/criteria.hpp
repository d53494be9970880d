// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance criteria as plain functions so that the driver and the
// integration tests can share them. Each returns a verdict plus a one-line
// account of what was measured.

#ifndef PDBMINE_TESTS_ACCEPTANCE_CRITERIA_HPP_
#define PDBMINE_TESTS_ACCEPTANCE_CRITERIA_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pdbmine/pdb_parser.hpp"
#include "pdbmine/torsion_store.hpp"

namespace pdbmine::acceptance {

struct Verdict {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0 when the criterion has no time budget
  std::map<std::string, double> metrics;  // named measurements behind the verdict
};

/// "PASS 3 ..." / "FAIL 3 ...", runtime appended.
std::string format_verdict(const Verdict& v);

// Self-contained criteria.
Verdict torsion_oracle_equivalence(std::uint64_t seed = 1);
Verdict round_trip_identity(std::uint64_t seed = 2);
Verdict kmer_oracle_equivalence(std::uint64_t seed = 3);
Verdict kde_correctness(std::uint64_t seed = 4);
Verdict statistics_consistency(std::uint64_t seed = 9);
Verdict store_durability(const std::filesystem::path& scratch, std::uint64_t seed = 10);

/// A corpus ingested into a scratch store, with the reference chain located.
struct Corpus {
  std::filesystem::path dir;
  std::filesystem::path store_dir;
  TorsionStore store;
  std::string reference_id;
  std::filesystem::path reference_file;
  ChainModel reference_chain;  // first chain, first model, parsed from the file
  std::string reference_sequence;
  std::size_t files = 0;
  double ingest_seconds = 0.0;
};

/// Ingests every structure file under `corpus_dir` into `scratch`/store.
/// Returns nullopt with `why` filled in when the corpus or the reference
/// structure is missing.
std::optional<Corpus> load_corpus(const std::filesystem::path& corpus_dir, const std::filesystem::path& scratch,
                                  const std::string& reference_id, std::string* why);

Verdict self_inclusion_prediction(const Corpus& corpus);
Verdict concentration_trend(const Corpus& corpus);
Verdict rspace_reproduction(const Corpus& corpus);

/// `frozen_rmsd` is the regression value of rebuilding the reference from its
/// own angles; without one the criterion cannot pass.
Verdict pipeline_composition(const Corpus& corpus, const std::filesystem::path& scratch,
                             std::optional<double> frozen_rmsd);

/// Verdict for a corpus criterion whose corpus could not be loaded.
Verdict missing_corpus(int id, const std::string& why);

}  // namespace pdbmine::acceptance

#endif  // PDBMINE_TESTS_ACCEPTANCE_CRITERIA_HPP_
