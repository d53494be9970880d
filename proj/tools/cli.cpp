// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pdbmine/error.hpp"
#include "pdbmine/geometry.hpp"
#include "pdbmine/kde_predictor.hpp"
#include "pdbmine/query_engine.hpp"
#include "pdbmine/torsion_store.hpp"

namespace fs = std::filesystem;

namespace pdbmine::cli {
namespace {

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

QueryFilter make_filter(const RunConfig& cfg) {
  QueryFilter filter;
  if (!cfg.methods.empty()) filter.methods = cfg.methods;
  filter.excluded_ids = cfg.excluded_ids;
  return filter;
}

TorsionStore open_store(const RunConfig& cfg) {
  if (cfg.store.empty()) throw Error(ErrorCode::kInvalidArgument, "--store is required");
  return TorsionStore::open(cfg.store);
}

int cmd_ingest(const std::vector<std::string>& paths, const RunConfig& cfg, std::ostream& out,
               std::ostream& err) {
  if (cfg.store.empty()) throw Error(ErrorCode::kInvalidArgument, "--store is required");
  const auto files = collect_pdb_files(paths);
  if (files.empty()) err << "warning: no input files; writing an empty store\n";

  IngestResult result;
  try {
    result = ingest(files, cfg.store, &err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  const auto& m = result.manifest;
  out << plural(m.structures.size(), "structure") << ", " << plural(m.chain_count, "chain") << ", "
      << plural(m.residue_count, "residue") << '\n';
  const auto store_bytes = store_size_bytes(cfg.store);
  const auto source_bytes = m.source_bytes();
  out << "store " << store_bytes << " bytes, sources " << source_bytes << " bytes";
  if (store_bytes > 0 && source_bytes > 0) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.2f", static_cast<double>(source_bytes) / static_cast<double>(store_bytes));
    out << ", compression " << ratio << "x";
  }
  out << '\n';
  if (!result.failures.empty()) err << "skipped " << plural(result.failures.size(), "file") << '\n';
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const TorsionStore store = open_store(cfg);
  out << "kmer,count,percent\n";
  char buf[64];
  for (const auto& row : count_kmers(store, cfg.k)) {
    std::snprintf(buf, sizeof buf, ",%llu,%.6f\n", static_cast<unsigned long long>(row.count), row.percent);
    out << row.kmer << buf;
  }
  return kExitOk;
}

std::string read_sequence(const std::string& text, const RunConfig& cfg) {
  return parse_sequence_input(text, cfg.triplet_mode);
}

int cmd_query(const std::string& seq_text, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  const TorsionStore store = open_store(cfg);
  const std::string sequence = read_sequence(seq_text, cfg);
  const auto windows = run_windows(sequence, cfg.k, store, make_filter(cfg));
  const auto paths = emit_csv(windows, cfg.out);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out << paths[i].filename().string() << ',' << windows[i].occurrences.size() << '\n';
  }
  return kExitOk;
}

int cmd_predict(const std::string& seq_text, const RunConfig& cfg, const std::string& grids_dir,
                std::ostream& out) {
  const TorsionStore store = open_store(cfg);
  const std::string sequence = read_sequence(seq_text, cfg);

  PredictConfig pc;
  pc.k = cfg.k;
  pc.kde = {cfg.bandwidth, cfg.resolution};
  pc.consolidate.filter = make_filter(cfg);
  pc.consolidate.dedup_by_source = cfg.dedup;

  std::vector<std::optional<DensityGrid>> grids;
  const auto predictions = predict_sequence(sequence, store, pc, grids_dir.empty() ? nullptr : &grids);
  const std::string table = format_predictions_csv(predictions);
  if (cfg.out.empty()) {
    out << table;
  } else {
    write_text(cfg.out, table);
  }
  if (!grids_dir.empty()) {
    for (std::size_t r = 0; r < grids.size(); ++r) {
      if (grids[r]) {
        write_text(fs::path(grids_dir) / ("residue_" + std::to_string(r) + "_grid.csv"),
                   format_grid_csv(*grids[r]));
      }
    }
  }
  return kExitOk;
}

int cmd_rama(const std::string& kmer, std::size_t offset, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  const TorsionStore store = open_store(cfg);
  const RSpace rs = export_rspace(kmer, offset, store, {cfg.bandwidth, cfg.resolution}, make_filter(cfg));
  const std::string stem = "rspace_" + kmer + "_" + std::to_string(offset);
  const fs::path grid_path = cfg.out / (stem + "_grid.csv");
  const fs::path obs_path = cfg.out / (stem + "_observations.csv");
  write_text(grid_path, format_grid_csv(rs.grid));
  write_text(obs_path, format_window_csv(rs.hits));
  const GridPeak peak = argmax(rs.grid);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu observations, peak at phi=%.1f psi=%.1f\n", rs.observations.size(),
                peak.phi, peak.psi);
  out << buf;
  return kExitOk;
}

std::optional<std::pair<double, double>> parse_fallback(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--fallback expects PHI,PSI");
  try {
    return std::make_pair(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "--fallback expects PHI,PSI");
  }
}

int cmd_build(const std::string& angles_csv, const std::string& fallback_text, double omega,
              const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  auto rows = parse_predictions_csv(read_text(angles_csv));
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].index != i) throw Error(ErrorCode::kInvalidArgument, "residue indices are not 0..n-1");
  }
  const auto fallback = parse_fallback(fallback_text);

  std::vector<TorsionTriple> angles;
  std::string sequence;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    TorsionTriple t{row.phi, row.psi, row.omega ? row.omega : std::optional<double>(omega)};
    const bool needs_phi = i > 0 && !t.phi;
    const bool needs_psi = i + 1 < rows.size() && !t.psi;
    if (row.no_data || needs_phi || needs_psi) {
      if (!fallback) {
        err << "error: residue " << i << " has no predicted angles; rerun with --fallback PHI,PSI "
            << "to build anyway\n";
        return kExitData;
      }
      if (row.no_data || !t.phi) t.phi = fallback->first;
      if (row.no_data || !t.psi) t.psi = fallback->second;
      ++filled;
    }
    if (i == 0 && !t.phi) t.phi = 0.0;
    if (i + 1 == rows.size() && !t.psi) t.psi = 0.0;
    angles.push_back(t);
    sequence.push_back(is_standard_code(row.residue) ? row.residue : 'G');
  }
  if (filled) err << "warning: used fallback angles for " << plural(filled, "residue") << '\n';

  const BackboneModel model = build_backbone(angles);
  write_text(cfg.out, format_backbone_pdb(model, sequence));
  out << plural(model.residues.size(), "residue") << ", " << plural(model.residues.size() * 3, "atom")
      << " written to " << cfg.out.string() << '\n';
  return kExitOk;
}

// Backbone atoms of the first model, chains in file order.
std::vector<const Residue*> first_model_residues(const ParsedStructure& s) {
  std::vector<const Residue*> out;
  if (s.chains.empty()) return out;
  const int model = s.chains.front().model;
  for (const auto& chain : s.chains) {
    if (chain.model != model) continue;
    for (const auto& r : chain.residues) out.push_back(&r);
  }
  return out;
}

int cmd_rmsd(const std::string& model_path, const std::string& reference_path, const RunConfig& cfg,
             std::ostream& out) {
  const auto model = parse_pdb_file(model_path);
  const auto reference = parse_pdb_file(reference_path);
  const auto a = first_model_residues(model);
  const auto b = first_model_residues(reference);
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "model has " + plural(a.size(), "residue") + ", reference " + plural(b.size(), "residue"));
  }
  std::vector<Vec3> pa;
  std::vector<Vec3> pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto take = [&](const std::optional<Vec3>& u, const std::optional<Vec3>& v) {
      if (u && v) {
        pa.push_back(*u);
        pb.push_back(*v);
      }
    };
    if (cfg.rmsd_atoms == RmsdAtoms::kBackbone) take(a[i]->n, b[i]->n);
    take(a[i]->ca, b[i]->ca);
    if (cfg.rmsd_atoms == RmsdAtoms::kBackbone) take(a[i]->c, b[i]->c);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f\n", kabsch_rmsd(pa, pb));
  out << buf;
  return kExitOk;
}

int cmd_extract(const std::string& pdb_path, const std::string& chain_id, std::ostream& out) {
  const auto parsed = parse_pdb_file(pdb_path);
  const ChainModel* chain = nullptr;
  for (const auto& c : parsed.chains) {
    if (chain_id.empty() || (chain_id.size() == 1 && c.chain == chain_id[0])) {
      chain = &c;
      break;
    }
  }
  if (!chain) throw Error(ErrorCode::kInvalidArgument, "chain '" + chain_id + "' not found");
  out << "index,residue,phi,psi,omega\n";
  for (const auto& row : extract_torsions(*chain)) {
    out << row.position_in_chain << ',' << row.code << ',' << (row.phi ? shortest(*row.phi) : "") << ','
        << (row.psi ? shortest(*row.psi) : "") << ',' << (row.omega ? shortest(*row.omega) : "") << '\n';
  }
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  if (k < 1 || k > kMaxKmerLength) throw Error(ErrorCode::kInvalidArgument, "k must be in 1..20");
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
}

std::vector<fs::path> collect_pdb_files(const std::vector<std::string>& paths) {
  std::vector<fs::path> out;
  auto is_structure_file = [](const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pdb" || ext == ".ent";
  };
  for (const auto& arg : paths) {
    const fs::path p(arg);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && is_structure_file(entry.path())) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torsion-angle mining over protein structure files", "pdbmine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with default option values (flags win)");

  RunConfig cfg;
  std::string store_path;
  std::string out_path;
  std::vector<std::string> methods;
  std::vector<std::string> excluded;
  bool ca_only = false;

  auto add_store = [&](CLI::App* sub) {
    sub->add_option("--store", store_path, "Store directory")->envname("PDBMINE_STORE");
  };
  auto add_filters = [&](CLI::App* sub) {
    sub->add_option("--methods", methods, "Experimental methods to admit (xray,nmr,em,other)")->delimiter(',');
    sub->add_option("--exclude", excluded, "Structure ids to leave out")->delimiter(',');
  };
  auto add_kde = [&](CLI::App* sub) {
    sub->add_option("--bandwidth", cfg.bandwidth, "KDE bandwidth in degrees")->capture_default_str();
    sub->add_option("--resolution", cfg.resolution, "Grid cell size in degrees")->capture_default_str();
  };

  std::vector<std::string> ingest_paths;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse structure files into a store");
  ingest_cmd->add_option("paths", ingest_paths, "PDB files or directories");
  add_store(ingest_cmd);

  auto* stats_cmd = app.add_subcommand("stats", "k-mer composition table (k = 1, 2 or 3)");
  add_store(stats_cmd);
  stats_cmd->add_option("--k", cfg.k, "k-mer length")->check(CLI::Range(1, 3))->capture_default_str();

  std::string sequence;
  auto* query_cmd = app.add_subcommand("query", "Rolling-window k-mer search, one CSV per window");
  query_cmd->add_option("sequence", sequence, "Query sequence")->required();
  add_store(query_cmd);
  query_cmd->add_option("--k", cfg.k, "Window size")->required();
  query_cmd->add_flag("--triplet", cfg.triplet_mode, "Sequence is given as three-letter names");
  add_filters(query_cmd);
  query_cmd->add_option("--out", out_path, "Output directory")->required();

  std::string grids_dir;
  auto* predict_cmd = app.add_subcommand("predict", "Maximum-likelihood phi/psi per residue");
  predict_cmd->add_option("sequence", sequence, "Query sequence")->required();
  add_store(predict_cmd);
  predict_cmd->add_option("--k", cfg.k, "Window size")->required();
  predict_cmd->add_flag("--triplet", cfg.triplet_mode, "Sequence is given as three-letter names");
  predict_cmd->add_flag("--dedup", cfg.dedup, "Count each source residue once per query residue");
  add_filters(predict_cmd);
  add_kde(predict_cmd);
  predict_cmd->add_option("--out", out_path, "Predictions CSV (default: standard output)");
  predict_cmd->add_option("--grids", grids_dir, "Directory for per-residue density grids");

  std::string kmer;
  std::size_t offset = 0;
  auto* rama_cmd = app.add_subcommand("rama", "Ramachandran density of one k-mer position");
  rama_cmd->add_option("kmer", kmer, "k-mer")->required();
  rama_cmd->add_option("--offset", offset, "Position within the k-mer")->capture_default_str();
  add_store(rama_cmd);
  add_filters(rama_cmd);
  add_kde(rama_cmd);
  rama_cmd->add_option("--out", out_path, "Output directory")->required();

  std::string angles_csv;
  std::string fallback;
  double omega = 180.0;
  auto* build_cmd = app.add_subcommand("build", "Backbone PDB from an angle table");
  build_cmd->add_option("angles", angles_csv, "Angle CSV (predict or extract output)")->required();
  build_cmd->add_option("--out", out_path, "Output PDB file")->required();
  build_cmd->add_option("--fallback", fallback, "PHI,PSI used for residues without data");
  build_cmd->add_option("--omega", omega, "Omega when the table has none")->capture_default_str();

  std::string model_path;
  std::string reference_path;
  auto* rmsd_cmd = app.add_subcommand("rmsd", "Backbone RMSD after optimal superposition");
  rmsd_cmd->add_option("model", model_path, "Model PDB")->required();
  rmsd_cmd->add_option("reference", reference_path, "Reference PDB")->required();
  rmsd_cmd->add_flag("--ca-only", ca_only, "Use CA atoms only");

  std::string extract_path;
  std::string chain_id;
  auto* extract_cmd = app.add_subcommand("extract", "Per-residue phi/psi/omega of one chain");
  extract_cmd->add_option("pdb", extract_path, "PDB file")->required();
  extract_cmd->add_option("--chain", chain_id, "Chain id (default: first chain)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.store = store_path;
  cfg.out = out_path;
  cfg.rmsd_atoms = ca_only ? RmsdAtoms::kCaOnly : RmsdAtoms::kBackbone;
  try {
    for (const auto& m : methods) {
      const auto parsed = parse_method(m);
      if (!parsed) throw Error(ErrorCode::kInvalidArgument, "unknown method '" + m + "'");
      cfg.methods.insert(*parsed);
    }
    for (auto id : excluded) {
      std::transform(id.begin(), id.end(), id.begin(), [](unsigned char c) { return std::toupper(c); });
      cfg.excluded_ids.insert(id);
    }
    cfg.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest_paths, cfg, out, err);
    if (*stats_cmd) return cmd_stats(cfg, out);
    if (*query_cmd) return cmd_query(sequence, cfg, out);
    if (*predict_cmd) return cmd_predict(sequence, cfg, grids_dir, out);
    if (*rama_cmd) return cmd_rama(kmer, offset, cfg, out);
    if (*build_cmd) return cmd_build(angles_csv, fallback, omega, cfg, out, err);
    if (*rmsd_cmd) return cmd_rmsd(model_path, reference_path, cfg, out);
    if (*extract_cmd) return cmd_extract(extract_path, chain_id, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kInvalidSequence ||
                       e.code() == ErrorCode::kSequenceTooShort;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace pdbmine::cli
