// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Backbone torsion mathematics: dihedrals from coordinates, phi/psi/omega
// along a chain, internal-to-Cartesian reconstruction, and superposition RMSD.
// All angles are in degrees on the half-open interval (-180, 180].

#ifndef PDBMINE_GEOMETRY_HPP_
#define PDBMINE_GEOMETRY_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/pdb_parser.hpp"
#include "pdbmine/vec3.hpp"

namespace pdbmine {

/// C(i-1)-N(i) distances above this mark a chain break.
inline constexpr double kChainBreakDistance = 2.5;

/// Maps any finite angle onto (-180, 180].
double wrap_degrees(double degrees);

/// Absolute angular distance in [0, 180].
double angular_distance(double a, double b);

/// Signed dihedral p1-p2-p3-p4 in (-180, 180]. Throws
/// Error(kDegenerateGeometry) on coincident or collinear input.
double torsion(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4);

struct ResidueTorsion {
  std::string structure_id;
  char chain = ' ';
  int model = 1;
  int position_in_chain = 0;
  char code = 'X';
  std::optional<double> phi;
  std::optional<double> psi;
  std::optional<double> omega;
};

/// One torsion row per residue. Angles touching a missing atom, a chain
/// break, or an X residue are left undefined.
std::vector<ResidueTorsion> extract_torsions(const ChainModel& chain);

struct TorsionTriple {
  std::optional<double> phi;
  std::optional<double> psi;
  std::optional<double> omega;
};

/// Ideal peptide geometry used for reconstruction. Lengths in Angstrom,
/// angles in degrees.
struct BackboneGeometry {
  double n_ca = 1.458;
  double ca_c = 1.525;
  double c_n = 1.329;
  double n_ca_c = 111.2;
  double ca_c_n = 116.2;
  double c_n_ca = 121.7;
};

struct BackboneResidue {
  Vec3 n;
  Vec3 ca;
  Vec3 c;
};

struct BackboneModel {
  std::vector<BackboneResidue> residues;

  /// N, CA, C of every residue in order.
  std::vector<Vec3> atoms() const;
  std::vector<Vec3> ca_atoms() const;
};

/// Places N, CA, C of each residue by natural extension of the reference
/// frame. The first residue seeds the frame: N at the origin, CA on +x, C in
/// the xy-plane with positive y. phi of residue 0 and psi/omega that would
/// extend past the chain ends are ignored. Throws Error(kUndefinedAngle) when
/// an interior angle (psi[0..n-2], omega[1..n-1], phi[1..n-1]) is missing.
BackboneModel build_backbone(std::span<const TorsionTriple> angles,
                             const BackboneGeometry& geometry = {});

/// Wraps a reconstructed backbone into a ChainModel so that it can go through
/// the same extraction path as parsed structures.
ChainModel to_chain_model(const BackboneModel& model, std::string_view sequence,
                          std::string structure_id = "MODL", char chain = 'A');

/// PDB ATOM lines (N, CA, C per residue; occupancy 1.00, B-factor 0.00)
/// followed by TER and END.
std::string format_backbone_pdb(const BackboneModel& model, std::string_view sequence,
                                char chain = 'A');

/// Minimal RMSD over proper rigid motions of `a` onto `b`. Throws
/// Error(kLengthMismatch) or Error(kTooFewPoints) (fewer than 3 points).
double kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace pdbmine

#endif  // PDBMINE_GEOMETRY_HPP_
