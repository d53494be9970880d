// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/query_engine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pdbmine/error.hpp"

namespace fs = std::filesystem;

namespace pdbmine {
namespace {

std::string format_angle(float value) {
  if (std::isnan(value)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(value));
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

std::vector<WindowQuery> dissect(std::string_view sequence, std::size_t k) {
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (!is_standard_code(sequence[i])) {
      throw Error(ErrorCode::kInvalidSequence, "'" + std::string(1, sequence[i]) + "' at position " +
                                                   std::to_string(i));
    }
  }
  if (k < 1 || k > kMaxKmerLength) {
    throw Error(ErrorCode::kInvalidArgument, "window size must be in 1..20");
  }
  if (sequence.size() < k) {
    throw Error(ErrorCode::kSequenceTooShort, "sequence of length " + std::to_string(sequence.size()) +
                                                  " is shorter than k = " + std::to_string(k));
  }
  std::vector<WindowQuery> out;
  out.reserve(sequence.size() - k + 1);
  for (std::size_t i = 0; i + k <= sequence.size(); ++i) {
    out.push_back({i, std::string(sequence.substr(i, k))});
  }
  return out;
}

std::vector<WindowResult> run_windows(std::string_view sequence, std::size_t k,
                                      const TorsionStore& store, const QueryFilter& filter) {
  std::vector<WindowResult> out;
  for (auto& query : dissect(sequence, k)) {
    WindowResult result;
    result.occurrences = store.find_kmer(query.kmer, filter);
    result.torsions.reserve(result.occurrences.size());
    for (const auto& occ : result.occurrences) result.torsions.push_back(store.get_torsions(occ, k));
    result.query = std::move(query);
    out.push_back(std::move(result));
  }
  return out;
}

std::vector<std::vector<DihedralObservation>> consolidate(std::span<const WindowResult> windows,
                                                          std::size_t sequence_length,
                                                          bool dedup_by_source) {
  std::vector<std::vector<DihedralObservation>> per_residue(sequence_length);
  std::vector<std::set<ObservationSource>> seen(dedup_by_source ? sequence_length : 0);

  for (const auto& w : windows) {
    const std::size_t k = w.query.kmer.size();
    for (std::size_t h = 0; h < w.occurrences.size(); ++h) {
      const auto& occ = w.occurrences[h];
      for (std::size_t offset = 0; offset < k; ++offset) {
        const TorsionPair pair = w.torsions[h][offset];
        if (std::isnan(pair.phi) || std::isnan(pair.psi)) continue;
        const std::size_t residue = w.query.query_index + offset;
        ObservationSource source{occ.structure_id, occ.chain, occ.model, occ.start + offset};
        if (dedup_by_source && !seen[residue].insert(source).second) continue;
        per_residue[residue].push_back(
            {pair.phi, pair.psi, std::move(source), w.query.query_index, offset});
      }
    }
  }
  return per_residue;
}

std::vector<std::vector<DihedralObservation>> consolidate(std::string_view sequence, std::size_t k,
                                                          const TorsionStore& store,
                                                          const ConsolidateOptions& options) {
  const auto windows = run_windows(sequence, k, store, options.filter);
  return consolidate(windows, sequence.size(), options.dedup_by_source);
}

std::string window_file_name(const WindowQuery& query) {
  return "window_" + std::to_string(query.query_index) + "_" + query.kmer + ".csv";
}

std::string format_window_csv(const WindowResult& window) {
  std::string out(kWindowCsvHeader);
  out += '\n';
  const std::size_t k = window.query.kmer.size();
  for (std::size_t h = 0; h < window.occurrences.size(); ++h) {
    const auto& occ = window.occurrences[h];
    for (std::size_t offset = 0; offset < k; ++offset) {
      const auto& pair = window.torsions[h][offset];
      out += occ.structure_id;
      out += ',';
      out += occ.chain;
      out += ',';
      out += std::to_string(occ.model);
      out += ',';
      out += std::to_string(offset);
      out += ',';
      out += one_to_three(window.query.kmer[offset]);
      out += ',';
      out += format_angle(pair.phi);
      out += ',';
      out += format_angle(pair.psi);
      out += '\n';
    }
  }
  return out;
}

std::vector<fs::path> emit_csv(std::span<const WindowResult> windows, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + directory.string() + ": " + ec.message());

  std::vector<fs::path> paths;
  for (const auto& w : windows) {
    const fs::path path = directory / window_file_name(w.query);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << format_window_csv(w);
    out.close();
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    paths.push_back(path);
  }
  return paths;
}

std::vector<WindowCsvRow> parse_window_csv(std::string_view text) {
  std::vector<WindowCsvRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kWindowCsvHeader) throw Error(ErrorCode::kInvalidArgument, "unexpected CSV header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    WindowCsvRow row;
    if (f.size() != 7 || f[1].size() != 1 || !parse_number(f[2], row.model) ||
        !parse_number(f[3], row.offset)) {
      throw Error(ErrorCode::kInvalidArgument, "malformed CSV row: " + std::string(line));
    }
    row.pdb_id = std::string(f[0]);
    row.chain = f[1][0];
    row.residue = std::string(f[4]);
    for (auto [field, target] : {std::pair{f[5], &row.phi}, std::pair{f[6], &row.psi}}) {
      if (field.empty()) continue;
      double v = 0.0;
      if (!parse_number(field, v)) {
        throw Error(ErrorCode::kInvalidArgument, "malformed angle in: " + std::string(line));
      }
      *target = v;
    }
    rows.push_back(std::move(row));
  }
  if (header) throw Error(ErrorCode::kInvalidArgument, "empty CSV");
  return rows;
}

std::string parse_sequence_input(std::string_view text, bool triplet_mode) {
  std::string out;
  if (!triplet_mode) {
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (!is_standard_code(up)) throw Error(ErrorCode::kInvalidSequence, std::string(1, ch));
      out.push_back(up);
    }
    return out;
  }
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    std::string up = token;
    for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char code = three_to_one(up);
    if (code == 'X') throw Error(ErrorCode::kInvalidSequence, token);
    out.push_back(code);
  }
  return out;
}

}  // namespace pdbmine
