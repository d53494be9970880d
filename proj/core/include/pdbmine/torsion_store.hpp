// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Flat-file torsion store. A store is a directory holding
//
//   manifest        line-oriented text, written last; its presence marks a
//                   complete store
//   sequences.txt   one line per chain: structure_id TAB chain TAB model TAB
//                   sequence
//   torsions.bin    float32 little-endian triples (phi, psi, omega) for every
//                   residue, chains in sequences.txt order, NaN = undefined
//
// Chains are kept sorted by (structure_id, chain, model). Once opened a store
// is immutable and safe to share between threads.

#ifndef PDBMINE_TORSION_STORE_HPP_
#define PDBMINE_TORSION_STORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/geometry.hpp"
#include "pdbmine/pdb_parser.hpp"

namespace pdbmine {

inline constexpr int kStoreFormatVersion = 1;
inline constexpr std::size_t kMaxKmerLength = 20;

struct StoredChain {
  std::string structure_id;
  char chain = ' ';
  int model = 1;
  std::string sequence;
  std::vector<float> phi;
  std::vector<float> psi;
  std::vector<float> omega;

  std::size_t size() const { return sequence.size(); }
};

/// Converts extracted torsions to the stored form (float32, NaN = undefined).
StoredChain make_stored_chain(const ChainModel& chain);

struct StructureEntry {
  ExperimentMeta meta;
  std::string source_path;
  std::uint64_t source_bytes = 0;
};

struct StoreManifest {
  int format_version = kStoreFormatVersion;
  std::size_t chain_count = 0;
  std::size_t residue_count = 0;
  std::vector<StructureEntry> structures;  // sorted by structure_id
  std::string build_timestamp;

  std::uint64_t source_bytes() const;
};

struct KmerOccurrence {
  std::string structure_id;
  char chain = ' ';
  int model = 1;
  std::size_t start = 0;

  friend bool operator==(const KmerOccurrence&, const KmerOccurrence&) = default;
};

struct TorsionPair {
  float phi;
  float psi;
};

/// Which structures a query may draw from.
struct QueryFilter {
  std::optional<std::set<Method>> methods;  // nullopt admits every method
  std::set<std::string> excluded_ids;

  bool admits(const ExperimentMeta& meta) const;
};

/// Throws Error(kInvalidKmer) unless 1 <= |kmer| <= 20 over the standard codes.
void validate_kmer(std::string_view kmer);

class TorsionStore {
 public:
  /// Opens a store directory. A directory without a manifest is reported
  /// as Error(kStoreAbsent); inconsistent files as Error(kStoreCorrupt).
  static TorsionStore open(const std::filesystem::path& dir);

  /// True when `dir` holds a manifest.
  static bool exists(const std::filesystem::path& dir);

  /// In-memory store; chains are sorted into canonical order.
  static TorsionStore from_chains(std::vector<StoredChain> chains,
                                  std::vector<StructureEntry> structures = {});

  const StoreManifest& manifest() const { return manifest_; }
  std::span<const StoredChain> chains() const { return chains_; }

  /// Metadata for a structure; structures without an entry are OTHER.
  const ExperimentMeta& meta(const std::string& structure_id) const;

  const StoredChain* find_chain(const std::string& structure_id, char chain, int model) const;

  /// Every exact occurrence of `kmer`, in (structure_id, chain, model, start)
  /// order.
  std::vector<KmerOccurrence> find_kmer(std::string_view kmer, const QueryFilter& filter = {}) const;

  /// The k torsion pairs starting at the occurrence. Throws
  /// Error(kStaleOccurrence) when the chain is gone or too short.
  std::vector<TorsionPair> get_torsions(const KmerOccurrence& occ, std::size_t k) const;

 private:
  struct Posting {
    std::uint32_t chain;
    std::uint32_t start;
  };

  void build_index();
  std::vector<KmerOccurrence> scan(std::string_view kmer, const QueryFilter& filter) const;

  StoreManifest manifest_;
  std::vector<StoredChain> chains_;
  std::map<std::string, ExperimentMeta> metas_;
  std::vector<std::vector<Posting>> trigram_index_;  // 20^3 buckets
};

struct KmerCount {
  std::string kmer;
  std::uint64_t count = 0;
  double percent = 0.0;
};

/// Composition table over all 20^k k-mers (k in 1..3) in lexicographic order.
/// Windows containing X are not counted.
std::vector<KmerCount> count_kmers(const TorsionStore& store, std::size_t k);

struct IngestFailure {
  std::string path;
  std::string message;
};

struct IngestResult {
  StoreManifest manifest;
  std::vector<IngestFailure> failures;
  std::size_t files_ingested = 0;
};

/// Parses `files` and merges them into the store at `destination` (created
/// when absent). A structure_id seen again replaces the earlier entry. Files
/// that fail to parse are listed in the result and, when `log` is given,
/// reported there. The new store is assembled in a sibling directory and
/// swapped in with a rename. Throws Error(kIoFailure) when the destination
/// cannot be written.
IngestResult ingest(std::span<const std::filesystem::path> files,
                    const std::filesystem::path& destination, std::ostream* log = nullptr);

/// Writes a complete store (manifest last) into an empty or new directory.
void write_store(const std::filesystem::path& dir, std::span<const StoredChain> chains,
                 const StoreManifest& manifest);

/// Bytes occupied by the store files.
std::uint64_t store_size_bytes(const std::filesystem::path& dir);

}  // namespace pdbmine

#endif  // PDBMINE_TORSION_STORE_HPP_
