// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Reader for the legacy fixed-column PDB text format. Only what the torsion
// pipeline needs is kept: polymer residues with their backbone atoms, the
// experimental method, and a record of every residue that was dropped or
// patched on the way.

#ifndef PDBMINE_PDB_PARSER_HPP_
#define PDBMINE_PDB_PARSER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/vec3.hpp"

namespace pdbmine {

/// The 20 standard one-letter codes, in alphabetical order.
inline constexpr std::string_view kStandardAlphabet = "ACDEFGHIKLMNPQRSTVWY";

/// Maps a residue name to its one-letter code; anything nonstandard is 'X'.
char three_to_one(std::string_view res_name);

/// Inverse of three_to_one for the 20 standard codes ("UNK" otherwise).
std::string_view one_to_three(char code);

bool is_standard_code(char code);
bool is_standard_amino_acid(std::string_view res_name);
bool is_nucleotide(std::string_view res_name);

enum class Method { kXray, kNmr, kEm, kOther };

std::string_view method_name(Method m);
/// Accepts the names produced by method_name (case-insensitive) plus the
/// short CLI spellings "xray", "nmr", "em", "other".
std::optional<Method> parse_method(std::string_view text);

struct AtomRecord {
  std::string structure_id;
  int model = 1;
  bool hetatm = false;
  int serial = 0;
  char chain = ' ';
  int res_seq = 0;
  std::optional<char> insertion_code;
  std::string res_name;
  std::string atom_name;
  std::optional<char> alt_loc;
  double occupancy = 1.0;
  double b_factor = 0.0;
  Vec3 position;

  friend bool operator==(const AtomRecord&, const AtomRecord&) = default;
};

struct ExperimentMeta {
  std::string structure_id;
  Method method = Method::kOther;
  std::optional<double> resolution;

  friend bool operator==(const ExperimentMeta&, const ExperimentMeta&) = default;
};

struct Residue {
  int res_seq = 0;
  std::optional<char> insertion_code;
  std::string res_name;
  char code = 'X';
  std::optional<Vec3> n;
  std::optional<Vec3> ca;
  std::optional<Vec3> c;
};

struct ChainModel {
  std::string structure_id;
  int model = 1;
  char chain = ' ';
  std::vector<Residue> residues;

  std::string sequence() const;
};

enum class AnomalyReason {
  kNonAminoAcid,          // nucleotide, water, ligand: dropped
  kHetatmNotInChain,      // HETATM residue outside the polymer numbering: dropped
  kDuplicateResidue,      // (res_seq, iCode) already taken in this chain: dropped
  kMalformedCoordinate,   // unparseable x/y/z: line dropped
  kAltLocResolved,        // alternate locations collapsed to one conformer: kept
  kMissingBackboneAtom,   // N, CA or C absent: kept, torsions undefined
  kNonstandardResidue,    // mapped to X: kept as a sequence placeholder
};

std::string_view anomaly_reason_name(AnomalyReason reason);

struct Anomaly {
  AnomalyReason reason;
  bool dropped = false;
  int model = 1;
  char chain = ' ';
  int res_seq = 0;
  std::optional<char> insertion_code;
  std::string res_name;
  std::size_t line_number = 0;  // 1-based; 0 when the entry is residue-level
  std::string detail;
};

struct AnomalyReport {
  std::vector<Anomaly> entries;

  std::size_t dropped_residue_count() const;
  std::size_t count(AnomalyReason reason) const;
};

struct ParsedStructure {
  std::vector<ChainModel> chains;
  ExperimentMeta meta;
  AnomalyReport anomalies;
};

/// Reads one ATOM/HETATM line. Lines shorter than 80 columns are treated as
/// padded with spaces. Throws Error(kMalformedCoordinate) when x, y or z is
/// not a number.
AtomRecord parse_atom_line(std::string_view line);

/// Inverse of parse_atom_line: 80 columns, coordinates with three decimals.
std::string format_atom_line(const AtomRecord& atom);

/// Collapses alternate locations of one residue's atoms. Per atom name, a
/// blank altLoc wins; otherwise highest occupancy, then smallest altLoc.
/// The survivors keep their original relative order.
std::vector<AtomRecord> resolve_altloc(std::span<const AtomRecord> atoms);

/// Parses a whole file. `name_hint` supplies the accession (file stem,
/// uppercased) when there is no HEADER record carrying one.
/// Throws Error(kUnreadableFile) for binary content and
/// Error(kEmptyStructure) when no standard amino-acid ATOM record exists.
ParsedStructure parse_pdb(std::string_view content, std::string_view name_hint = {});

/// Reads and parses a file from disk; the accession fallback is the file stem.
ParsedStructure parse_pdb_file(const std::string& path);

}  // namespace pdbmine

#endif  // PDBMINE_PDB_PARSER_HPP_
