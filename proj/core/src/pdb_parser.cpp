// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/pdb_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "pdbmine/error.hpp"

namespace pdbmine {
namespace {

struct CodeEntry {
  std::string_view name;
  char code;
};

// Sorted by name for binary search.
constexpr std::array<CodeEntry, 20> kCodes = {{
    {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'},
    {"GLN", 'Q'}, {"GLU", 'E'}, {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'},
    {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'}, {"PRO", 'P'},
    {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'},
}};

constexpr std::array<std::string_view, 12> kNucleotides = {
    "A", "C", "G", "I", "T", "U", "DA", "DC", "DG", "DI", "DT", "DU"};

constexpr std::array<std::string_view, 3> kWaters = {"HOH", "WAT", "DOD"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

// Column slice with 1-based inclusive bounds, padded with spaces past the end.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  if (first > line.size()) return {};
  return line.substr(first - 1, last - first + 1);
}

char column(std::string_view line, std::size_t col) {
  return col <= line.size() ? line[col - 1] : ' ';
}

std::optional<double> to_double(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<int> to_int(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::optional<char> blank_to_none(char ch) {
  if (ch == ' ') return std::nullopt;
  return ch;
}

bool starts_with_record(std::string_view line, std::string_view record) {
  return line.substr(0, record.size()) == record;
}

bool is_water(std::string_view res_name) {
  return std::find(kWaters.begin(), kWaters.end(), res_name) != kWaters.end();
}

Method method_from_expdta(std::string_view text) {
  const std::string u = upper(text);
  if (u.find("X-RAY") != std::string::npos) return Method::kXray;
  if (u.find("NMR") != std::string::npos) return Method::kNmr;
  if (u.find("ELECTRON MICROSCOPY") != std::string::npos) return Method::kEm;
  return Method::kOther;
}

std::optional<double> resolution_from_remark2(std::string_view line) {
  // REMARK   2 RESOLUTION.    1.80 ANGSTROMS.
  const std::string_view body = columns(line, 11, 80);
  const auto pos = body.find("RESOLUTION.");
  if (pos == std::string_view::npos) return std::nullopt;
  std::istringstream in{std::string(body.substr(pos + 11))};
  std::string token;
  in >> token;
  auto value = to_double(token);
  if (value && *value > 0.0) return value;
  return std::nullopt;
}

// One (res_seq, iCode, resName) group of atom lines within a model/chain.
struct Group {
  int res_seq = 0;
  std::optional<char> insertion_code;
  std::string res_name;
  bool from_atom = false;
  std::vector<AtomRecord> atoms;
};

struct Bucket {
  int model = 1;
  char chain = ' ';
  std::vector<Group> groups;
  std::map<std::tuple<int, char, std::string>, std::size_t> index;
};

const AtomRecord* find_atom(const std::vector<AtomRecord>& atoms, std::string_view name) {
  for (const auto& a : atoms) {
    if (a.atom_name == name) return &a;
  }
  return nullptr;
}

bool has_backbone(const std::vector<AtomRecord>& atoms) {
  return find_atom(atoms, "N") && find_atom(atoms, "CA") && find_atom(atoms, "C");
}

Anomaly residue_anomaly(AnomalyReason reason, bool dropped, const Bucket& b, const Group& g,
                        std::string detail = {}) {
  Anomaly a;
  a.reason = reason;
  a.dropped = dropped;
  a.model = b.model;
  a.chain = b.chain;
  a.res_seq = g.res_seq;
  a.insertion_code = g.insertion_code;
  a.res_name = g.res_name;
  a.detail = std::move(detail);
  return a;
}

// Residue numbers that HETATM polymer residues may occupy: the span of ATOM
// amino-acid residues, grown one step at a time through adjacent HETATM
// residues that carry a full backbone.
std::pair<int, int> polymer_span(const Bucket& bucket) {
  int lo = 0;
  int hi = -1;
  bool any = false;
  std::set<int> het_candidates;
  for (const auto& g : bucket.groups) {
    if (g.from_atom && (is_standard_amino_acid(g.res_name) || find_atom(g.atoms, "CA"))) {
      if (is_nucleotide(g.res_name)) continue;
      if (!any) {
        lo = hi = g.res_seq;
        any = true;
      } else {
        lo = std::min(lo, g.res_seq);
        hi = std::max(hi, g.res_seq);
      }
    } else if (!g.from_atom && has_backbone(g.atoms)) {
      het_candidates.insert(g.res_seq);
    }
  }
  if (!any) return {0, -1};
  while (het_candidates.count(lo - 1)) --lo;
  while (het_candidates.count(hi + 1)) ++hi;
  return {lo, hi};
}

void assemble_bucket(const Bucket& bucket, const std::string& structure_id,
                     std::vector<ChainModel>& out, AnomalyReport& report) {
  ChainModel chain;
  chain.structure_id = structure_id;
  chain.model = bucket.model;
  chain.chain = bucket.chain;

  const auto [span_lo, span_hi] = polymer_span(bucket);
  std::set<std::pair<int, char>> taken;

  for (const auto& g : bucket.groups) {
    const bool standard = is_standard_amino_acid(g.res_name);
    bool keep = false;
    AnomalyReason drop_reason = AnomalyReason::kNonAminoAcid;

    if (is_nucleotide(g.res_name) || is_water(g.res_name)) {
      keep = false;
    } else if (g.from_atom) {
      keep = standard || find_atom(g.atoms, "CA") != nullptr;
    } else if (has_backbone(g.atoms) && g.res_seq >= span_lo && g.res_seq <= span_hi) {
      keep = true;
    } else if (standard || has_backbone(g.atoms)) {
      drop_reason = AnomalyReason::kHetatmNotInChain;
    }

    if (keep) {
      const auto slot = std::make_pair(g.res_seq, g.insertion_code.value_or(' '));
      if (!taken.insert(slot).second) {
        keep = false;
        drop_reason = AnomalyReason::kDuplicateResidue;
      }
    }
    if (!keep) {
      report.entries.push_back(residue_anomaly(drop_reason, true, bucket, g));
      continue;
    }

    auto atoms = resolve_altloc(g.atoms);
    if (atoms.size() != g.atoms.size()) {
      report.entries.push_back(residue_anomaly(AnomalyReason::kAltLocResolved, false, bucket, g));
    }

    Residue residue;
    residue.res_seq = g.res_seq;
    residue.insertion_code = g.insertion_code;
    residue.res_name = g.res_name;
    residue.code = three_to_one(g.res_name);
    if (const auto* a = find_atom(atoms, "N")) residue.n = a->position;
    if (const auto* a = find_atom(atoms, "CA")) residue.ca = a->position;
    if (const auto* a = find_atom(atoms, "C")) residue.c = a->position;

    if (residue.code == 'X') {
      report.entries.push_back(
          residue_anomaly(AnomalyReason::kNonstandardResidue, false, bucket, g));
    }
    if (!residue.n || !residue.ca || !residue.c) {
      std::string missing;
      if (!residue.n) missing += " N";
      if (!residue.ca) missing += " CA";
      if (!residue.c) missing += " C";
      report.entries.push_back(residue_anomaly(AnomalyReason::kMissingBackboneAtom, false, bucket,
                                               g, "missing" + missing));
    }
    chain.residues.push_back(std::move(residue));
  }

  const bool has_standard = std::any_of(chain.residues.begin(), chain.residues.end(),
                                        [](const Residue& r) { return r.code != 'X'; });
  if (has_standard) {
    out.push_back(std::move(chain));
    return;
  }
  for (const auto& r : chain.residues) {
    Group g;
    g.res_seq = r.res_seq;
    g.insertion_code = r.insertion_code;
    g.res_name = r.res_name;
    report.entries.push_back(
        residue_anomaly(AnomalyReason::kNonAminoAcid, true, bucket, g, "chain has no standard residue"));
  }
}

}  // namespace

char three_to_one(std::string_view res_name) {
  const auto name = trim(res_name);
  const auto it = std::lower_bound(kCodes.begin(), kCodes.end(), name,
                                   [](const CodeEntry& e, std::string_view n) { return e.name < n; });
  if (it != kCodes.end() && it->name == name) return it->code;
  return 'X';
}

std::string_view one_to_three(char code) {
  for (const auto& e : kCodes) {
    if (e.code == code) return e.name;
  }
  return "UNK";
}

bool is_standard_code(char code) {
  return kStandardAlphabet.find(code) != std::string_view::npos;
}

bool is_standard_amino_acid(std::string_view res_name) { return three_to_one(res_name) != 'X'; }

bool is_nucleotide(std::string_view res_name) {
  const auto name = trim(res_name);
  return std::find(kNucleotides.begin(), kNucleotides.end(), name) != kNucleotides.end();
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kXray: return "XRAY";
    case Method::kNmr: return "NMR";
    case Method::kEm: return "EM";
    case Method::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<Method> parse_method(std::string_view text) {
  const std::string u = upper(trim(text));
  if (u == "XRAY" || u == "X-RAY") return Method::kXray;
  if (u == "NMR") return Method::kNmr;
  if (u == "EM") return Method::kEm;
  if (u == "OTHER") return Method::kOther;
  return std::nullopt;
}

std::string ChainModel::sequence() const {
  std::string seq;
  seq.reserve(residues.size());
  for (const auto& r : residues) seq.push_back(r.code);
  return seq;
}

std::string_view anomaly_reason_name(AnomalyReason reason) {
  switch (reason) {
    case AnomalyReason::kNonAminoAcid: return "non-amino-acid residue";
    case AnomalyReason::kHetatmNotInChain: return "hetatm outside polymer";
    case AnomalyReason::kDuplicateResidue: return "duplicate residue id";
    case AnomalyReason::kMalformedCoordinate: return "malformed coordinate";
    case AnomalyReason::kAltLocResolved: return "altloc resolved";
    case AnomalyReason::kMissingBackboneAtom: return "missing backbone atom";
    case AnomalyReason::kNonstandardResidue: return "nonstandard residue";
  }
  return "unknown";
}

std::size_t AnomalyReport::dropped_residue_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const Anomaly& a) {
    return a.dropped && a.line_number == 0;
  }));
}

std::size_t AnomalyReport::count(AnomalyReason reason) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [reason](const Anomaly& a) { return a.reason == reason; }));
}

AtomRecord parse_atom_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  AtomRecord atom;
  atom.hetatm = starts_with_record(line, "HETATM");
  atom.serial = to_int(columns(line, 7, 11)).value_or(0);
  atom.atom_name = std::string(trim(columns(line, 13, 16)));
  atom.alt_loc = blank_to_none(column(line, 17));
  atom.res_name = std::string(trim(columns(line, 18, 20)));
  atom.chain = column(line, 22);
  atom.insertion_code = blank_to_none(column(line, 27));

  const auto res_seq = to_int(columns(line, 23, 26));
  if (!res_seq) {
    throw Error(ErrorCode::kMalformedCoordinate,
                "residue number '" + std::string(columns(line, 23, 26)) + "'");
  }
  atom.res_seq = *res_seq;

  const auto x = to_double(columns(line, 31, 38));
  const auto y = to_double(columns(line, 39, 46));
  const auto z = to_double(columns(line, 47, 54));
  if (!x || !y || !z) {
    throw Error(ErrorCode::kMalformedCoordinate,
                "coordinates '" + std::string(columns(line, 31, 54)) + "'");
  }
  atom.position = {*x, *y, *z};
  if (atom.atom_name.empty()) {
    throw Error(ErrorCode::kMalformedCoordinate, "blank atom name");
  }

  atom.occupancy = std::clamp(to_double(columns(line, 55, 60)).value_or(1.0), 0.0, 1.0);
  atom.b_factor = to_double(columns(line, 61, 66)).value_or(0.0);
  return atom;
}

std::string format_atom_line(const AtomRecord& atom) {
  // Names shorter than four characters start in column 14.
  char name[5];
  if (atom.atom_name.size() >= 4) {
    std::snprintf(name, sizeof name, "%-4.4s", atom.atom_name.c_str());
  } else {
    std::snprintf(name, sizeof name, " %-3s", atom.atom_name.c_str());
  }
  char element[3] = {' ', ' ', '\0'};
  for (char ch : atom.atom_name) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      element[1] = ch;
      break;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-6s%5d %4s%c%3s %c%4d%c   %8.3f%8.3f%8.3f%6.2f%6.2f          %2s  ",
                atom.hetatm ? "HETATM" : "ATOM", atom.serial % 100000, name,
                atom.alt_loc.value_or(' '), atom.res_name.c_str(), atom.chain, atom.res_seq,
                atom.insertion_code.value_or(' '), atom.position.x, atom.position.y,
                atom.position.z, atom.occupancy, atom.b_factor, element);
  return std::string(buf);
}

std::vector<AtomRecord> resolve_altloc(std::span<const AtomRecord> atoms) {
  // Index of the preferred record per atom name.
  std::map<std::string, std::size_t> best;
  auto better = [](const AtomRecord& a, const AtomRecord& b) {
    if (!a.alt_loc || !b.alt_loc) return !a.alt_loc && b.alt_loc;
    if (a.occupancy != b.occupancy) return a.occupancy > b.occupancy;
    return *a.alt_loc < *b.alt_loc;
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto [it, inserted] = best.emplace(atoms[i].atom_name, i);
    if (!inserted && better(atoms[i], atoms[it->second])) it->second = i;
  }
  std::vector<AtomRecord> out;
  out.reserve(best.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (best.at(atoms[i].atom_name) == i) out.push_back(atoms[i]);
  }
  return out;
}

ParsedStructure parse_pdb(std::string_view content, std::string_view name_hint) {
  if (content.find('\0') != std::string_view::npos ||
      (content.size() >= 2 && static_cast<unsigned char>(content[0]) == 0x1f &&
       static_cast<unsigned char>(content[1]) == 0x8b)) {
    throw Error(ErrorCode::kUnreadableFile, "content is not text");
  }

  ParsedStructure result;
  std::string header_id;
  std::string expdta;
  std::vector<Bucket> buckets;
  std::map<std::pair<int, char>, std::size_t> bucket_index;
  int current_model = 1;
  int models_seen = 0;
  bool any_standard_atom = false;

  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (starts_with_record(line, "ATOM  ") || starts_with_record(line, "HETATM")) {
      AtomRecord atom;
      try {
        atom = parse_atom_line(line);
      } catch (const Error& e) {
        Anomaly a;
        a.reason = AnomalyReason::kMalformedCoordinate;
        a.dropped = true;
        a.model = current_model;
        a.chain = column(line, 22);
        a.res_name = std::string(trim(columns(line, 18, 20)));
        a.res_seq = to_int(columns(line, 23, 26)).value_or(0);
        a.line_number = line_number;
        a.detail = e.what();
        result.anomalies.entries.push_back(std::move(a));
        continue;
      }
      atom.model = current_model;
      if (!atom.hetatm && is_standard_amino_acid(atom.res_name)) any_standard_atom = true;

      const auto bkey = std::make_pair(atom.model, atom.chain);
      auto [bit, fresh] = bucket_index.emplace(bkey, buckets.size());
      if (fresh) {
        Bucket b;
        b.model = atom.model;
        b.chain = atom.chain;
        buckets.push_back(std::move(b));
      }
      Bucket& bucket = buckets[bit->second];
      const auto gkey = std::make_tuple(atom.res_seq, atom.insertion_code.value_or(' '), atom.res_name);
      auto [git, gfresh] = bucket.index.emplace(gkey, bucket.groups.size());
      if (gfresh) {
        Group g;
        g.res_seq = atom.res_seq;
        g.insertion_code = atom.insertion_code;
        g.res_name = atom.res_name;
        bucket.groups.push_back(std::move(g));
      }
      Group& group = bucket.groups[git->second];
      group.from_atom = group.from_atom || !atom.hetatm;
      group.atoms.push_back(std::move(atom));
    } else if (starts_with_record(line, "MODEL ")) {
      ++models_seen;
      current_model = to_int(columns(line, 11, 14)).value_or(models_seen);
      if (current_model <= 0) current_model = models_seen;
    } else if (starts_with_record(line, "HEADER")) {
      header_id = upper(trim(columns(line, 63, 66)));
    } else if (starts_with_record(line, "EXPDTA")) {
      expdta += std::string(columns(line, 11, 80));
      expdta += ' ';
    } else if (starts_with_record(line, "REMARK   2")) {
      if (!result.meta.resolution) result.meta.resolution = resolution_from_remark2(line);
    }
  }

  if (!any_standard_atom) {
    throw Error(ErrorCode::kEmptyStructure, "no standard amino-acid ATOM records");
  }

  std::string structure_id = header_id;
  if (structure_id.empty()) {
    structure_id = upper(std::filesystem::path(std::string(name_hint)).stem().string());
  }
  result.meta.structure_id = structure_id;
  result.meta.method = expdta.empty() ? Method::kOther : method_from_expdta(expdta);

  for (const auto& bucket : buckets) {
    assemble_bucket(bucket, structure_id, result.chains, result.anomalies);
  }
  return result;
}

ParsedStructure parse_pdb_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pdb(buf.str(), path);
}

}  // namespace pdbmine
