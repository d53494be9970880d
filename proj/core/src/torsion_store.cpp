// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/torsion_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unistd.h>

#include "pdbmine/error.hpp"

namespace fs = std::filesystem;

namespace pdbmine {
namespace {

constexpr const char* kManifestName = "manifest";
constexpr const char* kSequencesName = "sequences.txt";
constexpr const char* kTorsionsName = "torsions.bin";
constexpr std::size_t kTrigramBuckets = 20 * 20 * 20;

int alphabet_index(char code) {
  const auto pos = kStandardAlphabet.find(code);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

int trigram_key(std::string_view s) {
  const int a = alphabet_index(s[0]);
  const int b = alphabet_index(s[1]);
  const int c = alphabet_index(s[2]);
  if (a < 0 || b < 0 || c < 0) return -1;
  return (a * 20 + b) * 20 + c;
}

float to_stored(const std::optional<double>& angle) {
  return angle ? static_cast<float>(*angle) : std::numeric_limits<float>::quiet_NaN();
}

auto chain_order_key(const StoredChain& c) { return std::make_tuple(std::cref(c.structure_id), c.chain, c.model); }

void sort_chains(std::vector<StoredChain>& chains) {
  std::stable_sort(chains.begin(), chains.end(), [](const StoredChain& a, const StoredChain& b) {
    return chain_order_key(a) < chain_order_key(b);
  });
}

void put_le32(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xffu));
}

float get_le32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                             static_cast<std::uint32_t>(p[2]) << 16 |
                             static_cast<std::uint32_t>(p[3]) << 24;
  return std::bit_cast<float>(bits);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStoreCorrupt, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_manifest(const StoreManifest& m) {
  std::ostringstream out;
  out << "format pdbmine-store " << m.format_version << '\n';
  out << "chains " << m.chain_count << '\n';
  out << "residues " << m.residue_count << '\n';
  out << "built " << m.build_timestamp << '\n';
  for (const auto& s : m.structures) {
    out << "structure " << s.meta.structure_id << ' ' << method_name(s.meta.method) << ' '
        << (s.meta.resolution ? format_double(*s.meta.resolution) : std::string("-")) << ' '
        << s.source_bytes << ' ' << s.source_path << '\n';
  }
  out << "end\n";
  return out.str();
}

StoreManifest parse_manifest(const std::string& text) {
  StoreManifest m;
  std::istringstream in(text);
  std::string line;
  bool saw_format = false;
  bool saw_end = false;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "format") {
      std::string name;
      fields >> name >> m.format_version;
      if (name != "pdbmine-store" || !fields) throw Error(ErrorCode::kStoreCorrupt, "bad format line");
      if (m.format_version != kStoreFormatVersion) {
        throw Error(ErrorCode::kStoreCorrupt,
                    "unsupported store version " + std::to_string(m.format_version));
      }
      saw_format = true;
    } else if (key == "chains") {
      fields >> m.chain_count;
    } else if (key == "residues") {
      fields >> m.residue_count;
    } else if (key == "built") {
      fields >> m.build_timestamp;
    } else if (key == "structure") {
      StructureEntry e;
      std::string method;
      std::string resolution;
      fields >> e.meta.structure_id >> method >> resolution >> e.source_bytes;
      if (!fields) throw Error(ErrorCode::kStoreCorrupt, "bad structure line: " + line);
      e.meta.method = parse_method(method).value_or(Method::kOther);
      if (resolution != "-") e.meta.resolution = std::strtod(resolution.c_str(), nullptr);
      std::getline(fields >> std::ws, e.source_path);
      m.structures.push_back(std::move(e));
    } else if (key == "end") {
      saw_end = true;
      break;
    } else if (!key.empty()) {
      throw Error(ErrorCode::kStoreCorrupt, "unknown manifest key '" + key + "'");
    }
  }
  if (!saw_format || !saw_end) throw Error(ErrorCode::kStoreCorrupt, "truncated manifest");
  return m;
}

}  // namespace

StoredChain make_stored_chain(const ChainModel& chain) {
  StoredChain out;
  out.structure_id = chain.structure_id;
  out.chain = chain.chain;
  out.model = chain.model;
  out.sequence = chain.sequence();
  const auto rows = extract_torsions(chain);
  out.phi.reserve(rows.size());
  out.psi.reserve(rows.size());
  out.omega.reserve(rows.size());
  for (const auto& row : rows) {
    out.phi.push_back(to_stored(row.phi));
    out.psi.push_back(to_stored(row.psi));
    out.omega.push_back(to_stored(row.omega));
  }
  return out;
}

std::uint64_t StoreManifest::source_bytes() const {
  std::uint64_t total = 0;
  for (const auto& s : structures) total += s.source_bytes;
  return total;
}

bool QueryFilter::admits(const ExperimentMeta& meta) const {
  if (excluded_ids.count(meta.structure_id)) return false;
  return !methods || methods->count(meta.method) > 0;
}

void validate_kmer(std::string_view kmer) {
  if (kmer.empty()) throw Error(ErrorCode::kInvalidKmer, "empty k-mer");
  if (kmer.size() > kMaxKmerLength) {
    throw Error(ErrorCode::kInvalidKmer,
                "k = " + std::to_string(kmer.size()) + " exceeds " + std::to_string(kMaxKmerLength));
  }
  for (char ch : kmer) {
    if (!is_standard_code(ch)) {
      throw Error(ErrorCode::kInvalidKmer, "non-standard code '" + std::string(1, ch) + "'");
    }
  }
}

bool TorsionStore::exists(const fs::path& dir) {
  std::error_code ec;
  return fs::is_regular_file(dir / kManifestName, ec);
}

TorsionStore TorsionStore::open(const fs::path& dir) {
  if (!exists(dir)) throw Error(ErrorCode::kStoreAbsent, "no store manifest in " + dir.string());

  TorsionStore store;
  store.manifest_ = parse_manifest(read_file(dir / kManifestName));

  std::istringstream seqs(read_file(dir / kSequencesName));
  std::string line;
  while (std::getline(seqs, line)) {
    if (line.empty()) continue;
    StoredChain c;
    std::istringstream fields(line);
    std::string chain_field;
    if (!std::getline(fields, c.structure_id, '\t') || !std::getline(fields, chain_field, '\t') ||
        chain_field.size() != 1 || !(fields >> c.model)) {
      throw Error(ErrorCode::kStoreCorrupt, "bad sequence record: " + line);
    }
    c.chain = chain_field[0];
    fields.ignore(1);
    std::getline(fields, c.sequence);
    store.chains_.push_back(std::move(c));
  }

  std::size_t residues = 0;
  for (const auto& c : store.chains_) residues += c.size();
  if (store.chains_.size() != store.manifest_.chain_count ||
      residues != store.manifest_.residue_count) {
    throw Error(ErrorCode::kStoreCorrupt, "manifest counts disagree with sequences.txt");
  }

  const std::string blob = read_file(dir / kTorsionsName);
  if (blob.size() != residues * 12) {
    throw Error(ErrorCode::kStoreCorrupt, "torsions.bin holds " + std::to_string(blob.size()) +
                                              " bytes, expected " + std::to_string(residues * 12));
  }
  const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
  for (auto& c : store.chains_) {
    c.phi.resize(c.size());
    c.psi.resize(c.size());
    c.omega.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i, p += 12) {
      c.phi[i] = get_le32(p);
      c.psi[i] = get_le32(p + 4);
      c.omega[i] = get_le32(p + 8);
    }
  }

  for (const auto& s : store.manifest_.structures) store.metas_[s.meta.structure_id] = s.meta;
  store.build_index();
  return store;
}

TorsionStore TorsionStore::from_chains(std::vector<StoredChain> chains,
                                       std::vector<StructureEntry> structures) {
  TorsionStore store;
  sort_chains(chains);
  store.chains_ = std::move(chains);
  std::sort(structures.begin(), structures.end(), [](const auto& a, const auto& b) {
    return a.meta.structure_id < b.meta.structure_id;
  });
  store.manifest_.structures = std::move(structures);
  store.manifest_.chain_count = store.chains_.size();
  for (const auto& c : store.chains_) store.manifest_.residue_count += c.size();
  for (const auto& s : store.manifest_.structures) store.metas_[s.meta.structure_id] = s.meta;
  store.build_index();
  return store;
}

void TorsionStore::build_index() {
  for (const auto& c : chains_) {
    metas_.try_emplace(c.structure_id, ExperimentMeta{c.structure_id, Method::kOther, std::nullopt});
  }
  trigram_index_.assign(kTrigramBuckets, {});
  for (std::size_t ci = 0; ci < chains_.size(); ++ci) {
    const std::string& seq = chains_[ci].sequence;
    for (std::size_t p = 0; p + 3 <= seq.size(); ++p) {
      const int key = trigram_key(std::string_view(seq).substr(p, 3));
      if (key >= 0) {
        trigram_index_[static_cast<std::size_t>(key)].push_back(
            {static_cast<std::uint32_t>(ci), static_cast<std::uint32_t>(p)});
      }
    }
  }
}

const ExperimentMeta& TorsionStore::meta(const std::string& structure_id) const {
  static const ExperimentMeta kUnknown{};
  auto it = metas_.find(structure_id);
  return it != metas_.end() ? it->second : kUnknown;
}

const StoredChain* TorsionStore::find_chain(const std::string& structure_id, char chain,
                                            int model) const {
  const auto key = std::make_tuple(std::cref(structure_id), chain, model);
  auto it = std::lower_bound(chains_.begin(), chains_.end(), key,
                             [](const StoredChain& c, const auto& k) { return chain_order_key(c) < k; });
  if (it == chains_.end() || chain_order_key(*it) != key) return nullptr;
  return &*it;
}

std::vector<KmerOccurrence> TorsionStore::scan(std::string_view kmer,
                                               const QueryFilter& filter) const {
  std::vector<KmerOccurrence> out;
  for (const auto& c : chains_) {
    if (c.size() < kmer.size() || !filter.admits(meta(c.structure_id))) continue;
    const std::string_view seq = c.sequence;
    for (std::size_t p = 0; p + kmer.size() <= seq.size(); ++p) {
      if (seq.compare(p, kmer.size(), kmer) == 0) out.push_back({c.structure_id, c.chain, c.model, p});
    }
  }
  return out;
}

std::vector<KmerOccurrence> TorsionStore::find_kmer(std::string_view kmer,
                                                    const QueryFilter& filter) const {
  validate_kmer(kmer);
  if (kmer.size() < 3) return scan(kmer, filter);

  std::vector<KmerOccurrence> out;
  const auto& postings = trigram_index_[static_cast<std::size_t>(trigram_key(kmer))];
  std::uint32_t last_chain = std::numeric_limits<std::uint32_t>::max();
  bool admitted = false;
  for (const auto& post : postings) {
    const StoredChain& c = chains_[post.chain];
    if (post.chain != last_chain) {
      last_chain = post.chain;
      admitted = filter.admits(meta(c.structure_id));
    }
    if (!admitted || post.start + kmer.size() > c.size()) continue;
    if (std::string_view(c.sequence).compare(post.start, kmer.size(), kmer) == 0) {
      out.push_back({c.structure_id, c.chain, c.model, post.start});
    }
  }
  return out;
}

std::vector<TorsionPair> TorsionStore::get_torsions(const KmerOccurrence& occ, std::size_t k) const {
  const StoredChain* c = find_chain(occ.structure_id, occ.chain, occ.model);
  if (!c) {
    throw Error(ErrorCode::kStaleOccurrence, occ.structure_id + ":" + std::string(1, occ.chain) +
                                                 " model " + std::to_string(occ.model) +
                                                 " is not in the store");
  }
  if (occ.start + k > c->size()) {
    throw Error(ErrorCode::kStaleOccurrence, "occurrence runs past the end of " + occ.structure_id);
  }
  std::vector<TorsionPair> out;
  out.reserve(k);
  for (std::size_t i = occ.start; i < occ.start + k; ++i) out.push_back({c->phi[i], c->psi[i]});
  return out;
}

std::vector<KmerCount> count_kmers(const TorsionStore& store, std::size_t k) {
  if (k < 1 || k > 3) throw Error(ErrorCode::kInvalidArgument, "composition tables need k in 1..3");
  std::size_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) cells *= 20;

  std::vector<std::uint64_t> counts(cells, 0);
  std::uint64_t total = 0;
  for (const auto& c : store.chains()) {
    const std::string& seq = c.sequence;
    for (std::size_t p = 0; p + k <= seq.size(); ++p) {
      std::size_t key = 0;
      bool clean = true;
      for (std::size_t j = 0; j < k; ++j) {
        const int idx = alphabet_index(seq[p + j]);
        if (idx < 0) {
          clean = false;
          break;
        }
        key = key * 20 + static_cast<std::size_t>(idx);
      }
      if (clean) {
        ++counts[key];
        ++total;
      }
    }
  }

  std::vector<KmerCount> table(cells);
  for (std::size_t key = 0; key < cells; ++key) {
    std::string kmer(k, ' ');
    std::size_t rest = key;
    for (std::size_t j = k; j-- > 0;) {
      kmer[j] = kStandardAlphabet[rest % 20];
      rest /= 20;
    }
    table[key].kmer = std::move(kmer);
    table[key].count = counts[key];
    table[key].percent = total ? 100.0 * static_cast<double>(counts[key]) / static_cast<double>(total) : 0.0;
  }
  return table;
}

void write_store(const fs::path& dir, std::span<const StoredChain> chains,
                 const StoreManifest& manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());

  std::string seqs;
  std::string blob;
  for (const auto& c : chains) {
    if (c.phi.size() != c.size() || c.psi.size() != c.size() || c.omega.size() != c.size()) {
      throw Error(ErrorCode::kInvalidArgument, "torsion arrays do not match sequence length");
    }
    seqs += c.structure_id;
    seqs += '\t';
    seqs += c.chain;
    seqs += '\t';
    seqs += std::to_string(c.model);
    seqs += '\t';
    seqs += c.sequence;
    seqs += '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
      put_le32(blob, c.phi[i]);
      put_le32(blob, c.psi[i]);
      put_le32(blob, c.omega[i]);
    }
  }
  write_file(dir / kSequencesName, seqs);
  write_file(dir / kTorsionsName, blob);
  write_file(dir / kManifestName, format_manifest(manifest));
}

std::uint64_t store_size_bytes(const fs::path& dir) {
  std::uint64_t total = 0;
  for (const char* name : {kManifestName, kSequencesName, kTorsionsName}) {
    std::error_code ec;
    const auto size = fs::file_size(dir / name, ec);
    if (!ec) total += size;
  }
  return total;
}

IngestResult ingest(std::span<const fs::path> files, const fs::path& destination, std::ostream* log) {
  IngestResult result;
  std::vector<StoredChain> chains;
  std::map<std::string, StructureEntry> structures;

  if (TorsionStore::exists(destination)) {
    const TorsionStore previous = TorsionStore::open(destination);
    chains.assign(previous.chains().begin(), previous.chains().end());
    for (const auto& s : previous.manifest().structures) structures[s.meta.structure_id] = s;
  }

  for (const auto& path : files) {
    try {
      ParsedStructure parsed = parse_pdb_file(path.string());
      const std::string& id = parsed.meta.structure_id;
      std::erase_if(chains, [&](const StoredChain& c) { return c.structure_id == id; });
      for (const auto& chain : parsed.chains) chains.push_back(make_stored_chain(chain));

      StructureEntry entry;
      entry.meta = parsed.meta;
      entry.source_path = fs::absolute(path).lexically_normal().string();
      std::error_code ec;
      entry.source_bytes = fs::file_size(path, ec);
      structures[id] = std::move(entry);
      ++result.files_ingested;
    } catch (const Error& e) {
      result.failures.push_back({path.string(), e.what()});
      if (log) *log << "skipped " << path.string() << ": " << e.what() << '\n';
    }
  }

  sort_chains(chains);
  StoreManifest& m = result.manifest;
  m.chain_count = chains.size();
  for (const auto& c : chains) m.residue_count += c.size();
  for (auto& [id, entry] : structures) m.structures.push_back(entry);
  m.build_timestamp = utc_timestamp();

  const fs::path target = fs::absolute(destination).lexically_normal();
  const fs::path parent = target.parent_path();
  const std::string suffix = "." + std::to_string(::getpid());
  const fs::path staging = parent / (target.filename().string() + ".staging" + suffix);
  const fs::path retired = parent / (target.filename().string() + ".retired" + suffix);

  std::error_code ec;
  if (fs::exists(target, ec) && !fs::is_directory(target, ec)) {
    throw Error(ErrorCode::kIoFailure, target.string() + " exists and is not a directory");
  }
  if (fs::exists(target, ec) && !TorsionStore::exists(target)) {
    // Only an incomplete store (no manifest) may be overwritten.
    for (const auto& entry : fs::directory_iterator(target, ec)) {
      const auto name = entry.path().filename().string();
      if (name != kSequencesName && name != kTorsionsName) {
        throw Error(ErrorCode::kIoFailure, target.string() + " exists and is not a store");
      }
    }
  }
  fs::create_directories(parent, ec);
  fs::remove_all(staging, ec);
  write_store(staging, chains, m);

  ec.clear();
  const bool had_target = fs::exists(target, ec);
  if (had_target) {
    fs::rename(target, retired, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot replace " + target.string() + ": " + ec.message());
  }
  fs::rename(staging, target, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot install " + target.string() + ": " + ec.message());
  if (had_target) fs::remove_all(retired, ec);
  return result;
}

}  // namespace pdbmine
