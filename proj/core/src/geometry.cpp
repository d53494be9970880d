// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/geometry.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "pdbmine/error.hpp"

namespace pdbmine {
namespace {

constexpr double kDegenerateTolerance = 1e-9;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Position of atom d given a, b, c, the bond length |cd|, the bond angle
// b-c-d and the torsion a-b-c-d (degrees).
Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, double bond, double angle,
                double dihedral) {
  const Vec3 bc = (c - b) * (1.0 / norm(c - b));
  Vec3 n = cross(b - a, bc);
  n *= 1.0 / norm(n);
  const Vec3 m = cross(n, bc);

  const double theta = angle * kDegToRad;
  const double chi = dihedral * kDegToRad;
  const double dx = -bond * std::cos(theta);
  const double dy = bond * std::sin(theta) * std::cos(chi);
  const double dz = bond * std::sin(theta) * std::sin(chi);
  return c + bc * dx + m * dy + n * dz;
}

bool peptide_bonded(const Residue& prev, const Residue& next) {
  if (prev.code == 'X' || next.code == 'X') return false;
  if (!prev.c || !next.n) return false;
  return distance(*prev.c, *next.n) <= kChainBreakDistance;
}

std::optional<double> safe_torsion(const std::optional<Vec3>& p1, const std::optional<Vec3>& p2,
                                   const std::optional<Vec3>& p3, const std::optional<Vec3>& p4) {
  if (!p1 || !p2 || !p3 || !p4) return std::nullopt;
  try {
    return torsion(*p1, *p2, *p3, *p4);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string_view residue_name_for(std::string_view sequence, std::size_t i) {
  if (i < sequence.size()) return one_to_three(sequence[i]);
  return "GLY";
}

}  // namespace

double wrap_degrees(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

double angular_distance(double a, double b) { return std::abs(wrap_degrees(a - b)); }

double torsion(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4) {
  const Vec3 b1 = p2 - p1;
  const Vec3 b2 = p3 - p2;
  const Vec3 b3 = p4 - p3;
  const double b2_len = norm(b2);
  const Vec3 n1 = cross(b1, b2);
  const Vec3 n2 = cross(b2, b3);
  if (b2_len < kDegenerateTolerance || norm(n1) < kDegenerateTolerance ||
      norm(n2) < kDegenerateTolerance) {
    throw Error(ErrorCode::kDegenerateGeometry, "collinear or coincident points");
  }
  // IUPAC sign: positive when p1-p2 turns clockwise onto p3-p4 seen down p2->p3.
  const Vec3 m1 = cross(b2 * (1.0 / b2_len), n1);
  const double angle = std::atan2(dot(m1, n2), dot(n1, n2)) * kRadToDeg;
  return angle <= -180.0 ? 180.0 : angle;
}

std::vector<ResidueTorsion> extract_torsions(const ChainModel& chain) {
  const auto& res = chain.residues;
  std::vector<ResidueTorsion> out;
  out.reserve(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    ResidueTorsion row;
    row.structure_id = chain.structure_id;
    row.chain = chain.chain;
    row.model = chain.model;
    row.position_in_chain = static_cast<int>(i);
    row.code = res[i].code;

    if (i > 0 && peptide_bonded(res[i - 1], res[i])) {
      row.phi = safe_torsion(res[i - 1].c, res[i].n, res[i].ca, res[i].c);
      row.omega = safe_torsion(res[i - 1].ca, res[i - 1].c, res[i].n, res[i].ca);
    }
    if (i + 1 < res.size() && peptide_bonded(res[i], res[i + 1])) {
      row.psi = safe_torsion(res[i].n, res[i].ca, res[i].c, res[i + 1].n);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Vec3> BackboneModel::atoms() const {
  std::vector<Vec3> out;
  out.reserve(residues.size() * 3);
  for (const auto& r : residues) {
    out.push_back(r.n);
    out.push_back(r.ca);
    out.push_back(r.c);
  }
  return out;
}

std::vector<Vec3> BackboneModel::ca_atoms() const {
  std::vector<Vec3> out;
  out.reserve(residues.size());
  for (const auto& r : residues) out.push_back(r.ca);
  return out;
}

BackboneModel build_backbone(std::span<const TorsionTriple> angles,
                             const BackboneGeometry& geometry) {
  BackboneModel model;
  if (angles.empty()) return model;
  model.residues.reserve(angles.size());

  for (std::size_t i = 1; i < angles.size(); ++i) {
    const char* missing = !angles[i - 1].psi ? "psi" : !angles[i].omega ? "omega"
                                                   : !angles[i].phi     ? "phi"
                                                                        : nullptr;
    if (missing) {
      throw Error(ErrorCode::kUndefinedAngle,
                  std::string(missing) + " near residue " + std::to_string(i));
    }
  }

  const double seed_angle = geometry.n_ca_c * kDegToRad;
  BackboneResidue first;
  first.n = {0.0, 0.0, 0.0};
  first.ca = {geometry.n_ca, 0.0, 0.0};
  first.c = first.ca + Vec3{-std::cos(seed_angle), std::sin(seed_angle), 0.0} * geometry.ca_c;
  model.residues.push_back(first);

  for (std::size_t i = 1; i < angles.size(); ++i) {
    const auto& prev = model.residues.back();
    BackboneResidue next;
    next.n = place_atom(prev.n, prev.ca, prev.c, geometry.c_n, geometry.ca_c_n, *angles[i - 1].psi);
    next.ca = place_atom(prev.ca, prev.c, next.n, geometry.n_ca, geometry.c_n_ca, *angles[i].omega);
    next.c = place_atom(prev.c, next.n, next.ca, geometry.ca_c, geometry.n_ca_c, *angles[i].phi);
    model.residues.push_back(next);
  }
  return model;
}

ChainModel to_chain_model(const BackboneModel& model, std::string_view sequence,
                          std::string structure_id, char chain) {
  ChainModel out;
  out.structure_id = std::move(structure_id);
  out.chain = chain;
  out.model = 1;
  out.residues.reserve(model.residues.size());
  for (std::size_t i = 0; i < model.residues.size(); ++i) {
    Residue r;
    r.res_seq = static_cast<int>(i) + 1;
    r.res_name = std::string(residue_name_for(sequence, i));
    r.code = three_to_one(r.res_name);
    r.n = model.residues[i].n;
    r.ca = model.residues[i].ca;
    r.c = model.residues[i].c;
    out.residues.push_back(std::move(r));
  }
  return out;
}

std::string format_backbone_pdb(const BackboneModel& model, std::string_view sequence,
                                char chain) {
  std::string out;
  int serial = 0;
  for (std::size_t i = 0; i < model.residues.size(); ++i) {
    const auto& r = model.residues[i];
    const std::pair<const char*, const Vec3*> atoms[] = {{"N", &r.n}, {"CA", &r.ca}, {"C", &r.c}};
    for (const auto& [name, pos] : atoms) {
      AtomRecord atom;
      atom.serial = ++serial;
      atom.atom_name = name;
      atom.res_name = std::string(residue_name_for(sequence, i));
      atom.chain = chain;
      atom.res_seq = static_cast<int>(i) + 1;
      atom.occupancy = 1.0;
      atom.b_factor = 0.0;
      atom.position = *pos;
      out += format_atom_line(atom);
      out += '\n';
    }
  }
  if (!model.residues.empty()) {
    char ter[32];
    std::snprintf(ter, sizeof ter, "TER   %5d      %3s %c%4d", serial + 1,
                  std::string(residue_name_for(sequence, model.residues.size() - 1)).c_str(), chain,
                  static_cast<int>(model.residues.size()));
    out += ter;
    out += '\n';
  }
  out += "END\n";
  return out;
}

double kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " points");
  }
  if (a.size() < 3) throw Error(ErrorCode::kTooFewPoints, "need at least 3 points");

  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::Matrix3Xd pa(3, n);
  Eigen::Matrix3Xd pb(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& u = a[static_cast<std::size_t>(i)];
    const auto& v = b[static_cast<std::size_t>(i)];
    pa.col(i) << u.x, u.y, u.z;
    pb.col(i) << v.x, v.y, v.z;
  }
  const Eigen::Vector3d ca = pa.rowwise().mean();
  const Eigen::Vector3d cb = pb.rowwise().mean();
  pa.colwise() -= ca;
  pb.colwise() -= cb;

  const Eigen::Matrix3d h = pa * pb.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Eigen::Matrix3d rotation = svd.matrixV() * d * svd.matrixU().transpose();

  const double sq = (rotation * pa - pb).colwise().squaredNorm().sum();
  return std::sqrt(sq / static_cast<double>(n));
}

}  // namespace pdbmine
