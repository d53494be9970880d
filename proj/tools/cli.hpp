// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PDBMINE_TOOLS_CLI_HPP_
#define PDBMINE_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "pdbmine/pdb_parser.hpp"

namespace pdbmine::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

enum class RmsdAtoms { kBackbone, kCaOnly };

/// Options shared by the subcommands. Numeric fields must be positive and
/// k may not exceed 20.
struct RunConfig {
  std::filesystem::path store;
  std::size_t k = 3;
  double bandwidth = 10.0;
  double resolution = 1.0;
  std::set<Method> methods;  // empty admits all
  std::set<std::string> excluded_ids;
  std::filesystem::path out;
  bool triplet_mode = false;
  bool dedup = false;
  RmsdAtoms rmsd_atoms = RmsdAtoms::kBackbone;

  /// Throws Error(kInvalidArgument) on a violated invariant.
  void validate() const;
};

/// Expands directories recursively into their *.pdb / *.ent files, sorted.
std::vector<std::filesystem::path> collect_pdb_files(const std::vector<std::string>& paths);

/// Runs one command line (args excludes the program name). Data goes to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdbmine::cli

#endif  // PDBMINE_TOOLS_CLI_HPP_
