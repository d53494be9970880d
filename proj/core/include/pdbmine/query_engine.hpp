// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Rolling-window k-mer queries over a torsion store and per-residue
// consolidation of the matched dihedrals.

#ifndef PDBMINE_QUERY_ENGINE_HPP_
#define PDBMINE_QUERY_ENGINE_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/torsion_store.hpp"

namespace pdbmine {

struct WindowQuery {
  std::size_t query_index = 0;
  std::string kmer;

  std::size_t first_residue() const { return query_index; }
  std::size_t end_residue() const { return query_index + kmer.size(); }
};

/// The n - k + 1 overlapping windows of `sequence`. Throws
/// Error(kSequenceTooShort) or Error(kInvalidSequence).
std::vector<WindowQuery> dissect(std::string_view sequence, std::size_t k);

/// Store hits of one window together with the torsions at every offset.
struct WindowResult {
  WindowQuery query;
  std::vector<KmerOccurrence> occurrences;
  std::vector<std::vector<TorsionPair>> torsions;  // parallel to occurrences, k pairs each
};

std::vector<WindowResult> run_windows(std::string_view sequence, std::size_t k,
                                      const TorsionStore& store, const QueryFilter& filter = {});

struct ObservationSource {
  std::string structure_id;
  char chain = ' ';
  int model = 1;
  std::size_t position = 0;

  friend auto operator<=>(const ObservationSource&, const ObservationSource&) = default;
};

struct DihedralObservation {
  double phi = 0.0;
  double psi = 0.0;
  ObservationSource source;
  std::size_t window = 0;
  std::size_t offset = 0;
};

struct ConsolidateOptions {
  QueryFilter filter;
  /// Keep one observation per source residue instead of one per
  /// (window, source) pair.
  bool dedup_by_source = false;
};

/// Per residue of `sequence`, the (phi, psi) pairs of every hit of every
/// window covering it, in window order; pairs with an undefined angle are
/// dropped.
std::vector<std::vector<DihedralObservation>> consolidate(std::string_view sequence, std::size_t k,
                                                          const TorsionStore& store,
                                                          const ConsolidateOptions& options = {});

/// Same consolidation from already-fetched window results.
std::vector<std::vector<DihedralObservation>> consolidate(std::span<const WindowResult> windows,
                                                          std::size_t sequence_length,
                                                          bool dedup_by_source = false);

/// One CSV row of a window file.
struct WindowCsvRow {
  std::string pdb_id;
  char chain = ' ';
  int model = 1;
  std::size_t offset = 0;
  std::string residue;  // three-letter name
  std::optional<double> phi;
  std::optional<double> psi;

  friend bool operator==(const WindowCsvRow&, const WindowCsvRow&) = default;
};

inline constexpr std::string_view kWindowCsvHeader = "pdb_id,chain,model,offset,residue,phi,psi";

/// Formats one window's rows (header included). Angles use 4 decimals;
/// undefined angles are empty fields.
std::string format_window_csv(const WindowResult& window);

/// Writes window_<i>_<kmer>.csv per window into `directory` and returns the
/// paths. Throws Error(kIoFailure).
std::vector<std::filesystem::path> emit_csv(std::span<const WindowResult> windows,
                                            const std::filesystem::path& directory);

/// Parses text produced by format_window_csv. Throws Error(kInvalidArgument)
/// on a malformed header or row.
std::vector<WindowCsvRow> parse_window_csv(std::string_view text);

std::string window_file_name(const WindowQuery& query);

/// Normalizes user sequence input. Single-letter mode drops whitespace and
/// uppercases; triplet mode maps whitespace-separated residue names. Throws
/// Error(kInvalidSequence) naming the offending token.
std::string parse_sequence_input(std::string_view text, bool triplet_mode);

}  // namespace pdbmine

#endif  // PDBMINE_QUERY_ENGINE_HPP_
