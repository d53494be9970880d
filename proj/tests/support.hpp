// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the test binaries: scratch directories, random inputs and
// synthetic PDB text. Synthetic structures are ideal-geometry backbones built
// from sampled torsions; they are not deposited structures.

#ifndef PDBMINE_TESTS_SUPPORT_HPP_
#define PDBMINE_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/geometry.hpp"
#include "pdbmine/pdb_parser.hpp"

namespace pdbmine::testing {

inline constexpr double kPi = 3.14159265358979323846;

class TempDir {
 public:
  explicit TempDir(std::string_view tag = "t") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pdbmine_" + std::string(tag) + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Uniform on (-180, 180].
inline double random_angle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-180.0, 180.0);
  const double a = u(rng);
  return a == -180.0 ? 180.0 : a;
}

inline std::string random_sequence(std::mt19937_64& rng, std::size_t n, double x_rate = 0.0) {
  std::uniform_int_distribution<int> letter(0, 19);
  std::bernoulli_distribution is_x(x_rate);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(x_rate > 0.0 && is_x(rng) ? 'X' : kStandardAlphabet[letter(rng)]);
  return s;
}

/// Backbone angles whose basin depends on the residue and its neighbors, so
/// that longer k-mer contexts pin a residue's conformation more tightly.
/// Glycine mixes left- and right-handed basins; proline keeps phi near -65.
inline TorsionTriple context_angles(std::string_view seq, std::size_t i, std::mt19937_64& rng,
                                    double noise = 6.0) {
  struct Basin {
    double phi;
    double psi;
  };
  static constexpr Basin kBasins[] = {{-63, -42}, {-120, 130}, {-75, 145}, {-90, 0}};
  std::normal_distribution<double> jitter(0.0, noise);
  const char prev = i > 0 ? seq[i - 1] : '-';
  const char cur = seq[i];
  const char next = i + 1 < seq.size() ? seq[i + 1] : '-';
  const unsigned h = static_cast<unsigned>(prev) * 131u + static_cast<unsigned>(next) * 7u + static_cast<unsigned>(cur);
  Basin b = kBasins[h % 4];
  if (cur == 'G') b = (h % 3 == 0) ? Basin{-80, 170} : Basin{80, 10};
  if (cur == 'P') b = (h % 2 == 0) ? Basin{-65, 145} : Basin{-65, -35};
  return {wrap_degrees(b.phi + jitter(rng)), wrap_degrees(b.psi + jitter(rng)), 180.0 + jitter(rng) * 0.3};
}

inline BackboneModel context_backbone(std::string_view seq, std::mt19937_64& rng, double noise = 6.0) {
  std::vector<TorsionTriple> angles;
  for (std::size_t i = 0; i < seq.size(); ++i) angles.push_back(context_angles(seq, i, rng, noise));
  return build_backbone(angles);
}

struct SyntheticChain {
  char chain = 'A';
  std::string sequence;
  BackboneModel backbone;
  int first_res_seq = 1;
};

inline std::string header_line(std::string_view id) {
  std::string h(80, ' ');
  h.replace(0, 6, "HEADER");
  h.replace(10, 9, "SYNTHETIC");
  h.replace(62, id.size(), id);
  return h;
}

/// PDB text with one MODEL block per entry of `models` (a single model is
/// written without MODEL records).
inline std::string synthetic_pdb(std::string_view id, std::string_view expdta,
                                 const std::vector<std::vector<SyntheticChain>>& models) {
  std::string out = header_line(id) + "\n";
  if (!expdta.empty()) out += "EXPDTA    " + std::string(expdta) + "\n";
  out += "REMARK   2 RESOLUTION.    1.80 ANGSTROMS.\n";
  int serial = 1;
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (models.size() > 1) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "MODEL     %4zu", m + 1);
      out += buf;
      out += '\n';
    }
    for (const auto& ch : models[m]) {
      for (std::size_t r = 0; r < ch.sequence.size(); ++r) {
        const auto& res = ch.backbone.residues[r];
        const std::pair<const char*, Vec3> atoms[] = {{"N", res.n}, {"CA", res.ca}, {"C", res.c}};
        for (const auto& [name, pos] : atoms) {
          AtomRecord a;
          a.serial = serial++;
          a.chain = ch.chain;
          a.res_seq = ch.first_res_seq + static_cast<int>(r);
          a.res_name = std::string(one_to_three(ch.sequence[r]));
          a.atom_name = name;
          a.position = pos;
          out += format_atom_line(a) + "\n";
        }
      }
      out += "TER\n";
    }
    if (models.size() > 1) out += "ENDMDL\n";
  }
  out += "END\n";
  return out;
}

inline std::string synthetic_pdb(std::string_view id, std::string_view expdta, const SyntheticChain& chain) {
  return synthetic_pdb(id, expdta, std::vector<std::vector<SyntheticChain>>{{chain}});
}

/// Ubiquitin's 76-residue primary sequence.
inline constexpr std::string_view kUbiquitin =
    "MQIFVKTLTGKTITLEVEPSDTIENVKAKIQDKEGIPPDQQRLIFAGKQLEDGRTLSDYNIQKESTLHLVLRLRGG";

}  // namespace pdbmine::testing

#endif  // PDBMINE_TESTS_SUPPORT_HPP_
