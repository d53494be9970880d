// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "oracles.hpp"
#include "pdbmine/kde_predictor.hpp"
#include "support.hpp"

namespace pdbmine {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

testing::SyntheticChain make_chain(std::string seq, std::uint64_t seed, char chain = 'A') {
  std::mt19937_64 rng(seed);
  testing::SyntheticChain c;
  c.chain = chain;
  c.backbone = testing::context_backbone(seq, rng);
  c.sequence = std::move(seq);
  return c;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(tmp_ / "pdb" / "nested");
    first_ = make_chain("MKVLAAGIWHEDRTSPQNYF", 1);
    second_ = make_chain("GSHMKVLEEEKRRQ", 2);
    testing::write_file(tmp_ / "pdb" / "1ABC.pdb", testing::synthetic_pdb("1ABC", "X-RAY DIFFRACTION", first_));
    testing::write_file(tmp_ / "pdb" / "nested" / "2XYZ.ent",
                        testing::synthetic_pdb("2XYZ", "SOLUTION NMR", second_));
    testing::write_file(tmp_ / "pdb" / "nested" / "notes.txt", "not a structure\n");
    store_ = (tmp_ / "store").string();
  }

  void ingest() {
    const auto r = run_cli({"ingest", (tmp_ / "pdb").string(), "--store", store_});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }

  testing::TempDir tmp_{"cli"};
  testing::SyntheticChain first_;
  testing::SyntheticChain second_;
  std::string store_;
};

TEST_F(CliTest, IngestRecursesAndSummarizes) {
  const auto r = run_cli({"ingest", (tmp_ / "pdb").string(), "--store", store_});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("2 structures, 2 chains, 34 residues\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("compression "), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(store_) / "manifest"));
}

TEST(CollectPdbFiles, SortedRecursiveAndExplicitFilesKept) {
  testing::TempDir tmp("collect");
  fs::create_directories(tmp / "a" / "b");
  testing::write_file(tmp / "a" / "b" / "z.PDB", "");
  testing::write_file(tmp / "a" / "y.ent", "");
  testing::write_file(tmp / "a" / "x.cif", "");
  const auto files = cli::collect_pdb_files({(tmp / "a").string(), (tmp / "explicit.txt").string()});
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0], tmp / "a" / "b" / "z.PDB");
  EXPECT_EQ(files[1], tmp / "a" / "y.ent");
  EXPECT_EQ(files[2], tmp / "explicit.txt");
}

TEST_F(CliTest, EmptyIngestWarnsAndStatsStillWork) {
  fs::create_directories(tmp_ / "empty");
  const auto r = run_cli({"ingest", (tmp_ / "empty").string(), "--store", store_});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("0 structures"), std::string::npos);
  const auto s = run_cli({"stats", "--store", store_, "--k", "1"});
  EXPECT_EQ(s.code, cli::kExitOk) << s.err;
  EXPECT_EQ(s.out.rfind("kmer,count,percent\n", 0), 0u);
}

TEST_F(CliTest, StatsRowCounts) {
  ingest();
  const auto k1 = run_cli({"stats", "--store", store_, "--k", "1"});
  ASSERT_EQ(k1.code, cli::kExitOk) << k1.err;
  EXPECT_EQ(line_count(k1.out), 21u);
  const auto k2 = run_cli({"stats", "--store", store_, "--k", "2"});
  EXPECT_EQ(line_count(k2.out), 401u);
  const auto k4 = run_cli({"stats", "--store", store_, "--k", "4"});
  EXPECT_EQ(k4.code, cli::kExitUsage);
}

TEST_F(CliTest, QueryWritesOneFilePerWindow) {
  ingest();
  const auto out_dir = tmp_ / "q";
  const auto r = run_cli({"query", "MKVLAE", "--k", "3", "--store", store_, "--out", out_dir.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(r.out), 4u);
  // MKV and KVL occur in both chains, VLA only in the first, LAE in neither.
  EXPECT_NE(r.out.find(",2\n"), std::string::npos);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out_dir)) files += e.path().extension() == ".csv";
  EXPECT_EQ(files, 4u);
}

TEST_F(CliTest, QueryMethodFilterAndExclusion) {
  ingest();
  const auto nmr = run_cli({"query", "MKVL", "--k", "4", "--store", store_, "--out", (tmp_ / "a").string(),
                            "--methods", "nmr"});
  ASSERT_EQ(nmr.code, cli::kExitOk) << nmr.err;
  EXPECT_NE(nmr.out.find(",1\n"), std::string::npos);
  const auto excl = run_cli({"query", "MKVL", "--k", "4", "--store", store_, "--out", (tmp_ / "b").string(),
                             "--exclude", "1abc,2xyz"});
  ASSERT_EQ(excl.code, cli::kExitOk);
  EXPECT_NE(excl.out.find(",0\n"), std::string::npos);
  const auto bad = run_cli({"query", "MKVL", "--k", "4", "--store", store_, "--out", (tmp_ / "c").string(),
                            "--methods", "cryo"});
  EXPECT_EQ(bad.code, cli::kExitUsage);
}

TEST_F(CliTest, PredictBuildRmsdRecoversAnIngestedChain) {
  ingest();
  const auto pred = tmp_ / "pred.csv";
  const auto r = run_cli({"predict", first_.sequence, "--k", "5", "--store", store_, "--out", pred.string(),
                          "--grids", (tmp_ / "grids").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = parse_predictions_csv(testing::read_file(pred));
  ASSERT_EQ(rows.size(), first_.sequence.size());
  // Every k=5 window of the first chain is absent from the second, so each
  // interior peak sits within half a grid cell of the true angle. The
  // terminal residues only ever see observations missing phi or psi.
  const auto truth = extract_torsions(parse_pdb(testing::read_file(tmp_ / "pdb" / "1ABC.pdb"), "1ABC").chains[0]);
  EXPECT_TRUE(rows.front().no_data);
  EXPECT_TRUE(rows.back().no_data);
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    ASSERT_FALSE(rows[i].no_data) << i;
    ASSERT_TRUE(rows[i].phi && rows[i].psi);
    EXPECT_LE(angular_distance(*rows[i].phi, *truth[i].phi), 0.5 + 1e-3) << i;
    EXPECT_LE(angular_distance(*rows[i].psi, *truth[i].psi), 0.5 + 1e-3) << i;
  }
  EXPECT_FALSE(fs::exists(tmp_ / "grids" / "residue_0_grid.csv"));
  EXPECT_TRUE(fs::exists(tmp_ / "grids" / "residue_1_grid.csv"));

  const auto model = tmp_ / "model.pdb";
  ASSERT_EQ(run_cli({"build", pred.string(), "--out", model.string()}).code, cli::kExitData);
  const auto b = run_cli({"build", pred.string(), "--out", model.string(), "--fallback", "-63,-42"});
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  EXPECT_NE(b.out.find("20 residues, 60 atoms"), std::string::npos);

  const auto m = run_cli({"rmsd", model.string(), (tmp_ / "pdb" / "1ABC.pdb").string()});
  ASSERT_EQ(m.code, cli::kExitOk) << m.err;
  // A wrong psi on residue 0 only misplaces that residue after superposition;
  // half-degree errors and the fixed 180 omega compound along the rest.
  EXPECT_LT(std::stod(m.out), 1.0) << m.out;
}

TEST_F(CliTest, PredictToStdoutIsByteIdenticalAcrossRuns) {
  ingest();
  const auto a = run_cli({"predict", "KVLAEE", "--k", "2", "--store", store_});
  const auto b = run_cli({"predict", "KVLAEE", "--k", "2", "--store", store_});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind(std::string(kPredictionCsvHeader), 0), 0u);
}

TEST_F(CliTest, BuildRefusesNoDataUnlessFallbackGiven) {
  ingest();
  const auto pred = tmp_ / "pred.csv";
  ASSERT_EQ(run_cli({"predict", "WWWKVL", "--k", "3", "--store", store_, "--out", pred.string()}).code,
            cli::kExitOk);
  const auto rows = parse_predictions_csv(testing::read_file(pred));
  ASSERT_TRUE(rows[0].no_data);

  const auto model = tmp_ / "model.pdb";
  const auto refused = run_cli({"build", pred.string(), "--out", model.string()});
  EXPECT_EQ(refused.code, cli::kExitData);
  EXPECT_NE(refused.err.find("--fallback"), std::string::npos);
  EXPECT_FALSE(fs::exists(model));

  const auto ok = run_cli({"build", pred.string(), "--out", model.string(), "--fallback", "-63,-42"});
  ASSERT_EQ(ok.code, cli::kExitOk) << ok.err;
  EXPECT_NE(ok.err.find("fallback"), std::string::npos);
  EXPECT_EQ(parse_pdb(testing::read_file(model), "M").chains[0].residues.size(), 6u);

  EXPECT_EQ(run_cli({"build", pred.string(), "--out", model.string(), "--fallback", "x"}).code, cli::kExitUsage);
}

TEST_F(CliTest, RmsdSelfAndRigidCopyAreZero) {
  const auto ref = tmp_ / "pdb" / "1ABC.pdb";
  const auto self = run_cli({"rmsd", ref.string(), ref.string()});
  ASSERT_EQ(self.code, cli::kExitOk) << self.err;
  EXPECT_EQ(self.out, "0.000\n");

  std::mt19937_64 rng(77);
  const auto rot = oracles::random_rotation(rng);
  testing::SyntheticChain moved = first_;
  for (auto& res : moved.backbone.residues) {
    res.n = oracles::rotate(rot, res.n) + Vec3{5, -3, 12};
    res.ca = oracles::rotate(rot, res.ca) + Vec3{5, -3, 12};
    res.c = oracles::rotate(rot, res.c) + Vec3{5, -3, 12};
  }
  const auto copy = tmp_ / "moved.pdb";
  testing::write_file(copy, testing::synthetic_pdb("MOVE", "X-RAY DIFFRACTION", moved));
  // Coordinates are stored to 0.001 A, so a moved copy carries rounding noise.
  EXPECT_LE(std::stod(run_cli({"rmsd", copy.string(), ref.string()}).out), 0.001);
  EXPECT_LE(std::stod(run_cli({"rmsd", copy.string(), ref.string(), "--ca-only"}).out), 0.001);

  const auto mismatch = run_cli({"rmsd", copy.string(), (tmp_ / "pdb" / "nested" / "2XYZ.ent").string()});
  EXPECT_EQ(mismatch.code, cli::kExitData);
  EXPECT_NE(mismatch.err.find("residue"), std::string::npos);
}

TEST_F(CliTest, ExtractThenBuildReproducesTheChain) {
  const auto ref = tmp_ / "pdb" / "1ABC.pdb";
  const auto e = run_cli({"extract", ref.string(), "--chain", "A"});
  ASSERT_EQ(e.code, cli::kExitOk) << e.err;
  EXPECT_EQ(line_count(e.out), 21u);
  EXPECT_EQ(e.out.rfind("index,residue,phi,psi,omega\n0,M,,", 0), 0u);
  const auto csv = tmp_ / "angles.csv";
  testing::write_file(csv, e.out);
  const auto model = tmp_ / "rebuilt.pdb";
  ASSERT_EQ(run_cli({"build", csv.string(), "--out", model.string()}).code, cli::kExitOk);
  const auto m = run_cli({"rmsd", model.string(), ref.string()});
  EXPECT_LT(std::stod(m.out), 0.01) << m.out;

  EXPECT_EQ(run_cli({"extract", ref.string(), "--chain", "Q"}).code, cli::kExitUsage);
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
  ingest();
  const auto cfg = tmp_ / "pdbmine.toml";
  testing::write_file(cfg, "[stats]\nstore = \"" + store_ + "\"\nk = 2\n");
  const auto r = run_cli({"--config", cfg.string(), "stats"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(r.out), 401u);
  const auto flag_wins = run_cli({"--config", cfg.string(), "stats", "--k", "1"});
  EXPECT_EQ(line_count(flag_wins.out), 21u);
}

TEST_F(CliTest, StoreFromEnvironment) {
  ingest();
  ::setenv("PDBMINE_STORE", store_.c_str(), 1);
  const auto r = run_cli({"stats", "--k", "1"});
  ::unsetenv("PDBMINE_STORE");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(r.out), 21u);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"stats"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"stats", "--store", (tmp_ / "nowhere").string()}).code, cli::kExitData);
  ingest();
  EXPECT_EQ(run_cli({"predict", "KVL", "--k", "0", "--store", store_}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"predict", "KVL", "--k", "21", "--store", store_}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"predict", "KVL", "--k", "3", "--bandwidth", "0", "--store", store_}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"predict", "KV1", "--k", "2", "--store", store_}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"predict", "KV", "--k", "3", "--store", store_}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"rmsd", (tmp_ / "missing.pdb").string(), (tmp_ / "missing.pdb").string()}).code,
            cli::kExitData);
}

TEST_F(CliTest, RamaWritesGridAndObservations) {
  ingest();
  const auto r = run_cli({"rama", "KVL", "--offset", "1", "--store", store_, "--out", (tmp_ / "r").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("2 observations, peak at phi=", 0), 0u) << r.out;
  EXPECT_TRUE(fs::exists(tmp_ / "r" / "rspace_KVL_1_grid.csv"));
  EXPECT_TRUE(fs::exists(tmp_ / "r" / "rspace_KVL_1_observations.csv"));
  EXPECT_EQ(run_cli({"rama", "KVL", "--offset", "3", "--store", store_, "--out", (tmp_ / "r").string()}).code,
            cli::kExitUsage);
}

}  // namespace
}  // namespace pdbmine
