// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/kde_predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "pdbmine/error.hpp"
#include "pdbmine/geometry.hpp"

namespace pdbmine {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr int kWrapTurns = 2;

std::size_t cells_for(double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  const double cells = 360.0 / resolution;
  const double rounded = std::round(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "resolution must divide 360");
  }
  return static_cast<std::size_t>(rounded);
}

// Wrapped Gaussian on the circle (radian measure). Depends on |delta| only,
// so mirror-image cells get bit-identical weights.
double wrapped_kernel(double delta_degrees, double sigma_radians) {
  const double d = std::abs(wrap_degrees(delta_degrees)) * kDegToRad;
  const double inv_two_var = 1.0 / (2.0 * sigma_radians * sigma_radians);
  double sum = 0.0;
  for (int m = -kWrapTurns; m <= kWrapTurns; ++m) {
    const double x = d + 2.0 * std::numbers::pi * m;
    sum += std::exp(-x * x * inv_two_var);
  }
  return sum / (sigma_radians * std::sqrt(2.0 * std::numbers::pi));
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string general(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> optional_number(std::string_view field, std::string_view line) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kInvalidArgument, "malformed number in: " + std::string(line));
  }
  return v;
}

}  // namespace

DensityGrid::DensityGrid(double resolution, double bandwidth, std::size_t observation_count,
                         std::vector<double> values)
    : resolution_(resolution),
      bandwidth_(bandwidth),
      observation_count_(observation_count),
      cells_(cells_for(resolution)),
      values_(std::move(values)) {
  if (values_.size() != cells_ * cells_) {
    throw Error(ErrorCode::kInvalidArgument, "grid value count does not match resolution");
  }
}

double DensityGrid::integral() const {
  const double area = resolution_ * kDegToRad * resolution_ * kDegToRad;
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * area;
}

DensityGrid estimate_density(std::span<const AnglePair> observations, const KdeConfig& config) {
  if (observations.empty()) throw Error(ErrorCode::kEmptyObservations, "no observations to smooth");
  if (!(config.bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  const std::size_t cells = cells_for(config.resolution);
  const auto n = static_cast<Eigen::Index>(cells);
  const auto count = static_cast<Eigen::Index>(observations.size());
  const double sigma = config.bandwidth * kDegToRad;

  // Per-axis kernel weights; the grid is their outer product summed over
  // observations.
  Eigen::MatrixXd phi_weights(n, count);
  Eigen::MatrixXd psi_weights(n, count);
  for (Eigen::Index o = 0; o < count; ++o) {
    const auto& obs = observations[static_cast<std::size_t>(o)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double center = -180.0 + (static_cast<double>(i) + 0.5) * config.resolution;
      phi_weights(i, o) = wrapped_kernel(center - obs.phi, sigma);
      psi_weights(i, o) = wrapped_kernel(center - obs.psi, sigma);
    }
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> grid =
      phi_weights * psi_weights.transpose();

  const double cell_area = config.resolution * kDegToRad * config.resolution * kDegToRad;
  const double total = grid.sum() * cell_area;
  grid /= total;

  std::vector<double> values(grid.data(), grid.data() + grid.size());
  return DensityGrid(config.resolution, config.bandwidth, observations.size(), std::move(values));
}

GridPeak argmax(const DensityGrid& grid) {
  const auto values = grid.values();
  std::size_t best = 0;
  for (std::size_t idx = 1; idx < values.size(); ++idx) {
    if (values[idx] > values[best]) best = idx;
  }
  GridPeak peak;
  peak.phi_index = best / grid.cells_per_axis();
  peak.psi_index = best % grid.cells_per_axis();
  peak.phi = grid.center(peak.phi_index);
  peak.psi = grid.center(peak.psi_index);
  peak.density = values[best];
  return peak;
}

double circular_std_degrees(std::span<const double> angles) {
  if (angles.empty()) return 0.0;
  double c = 0.0;
  double s = 0.0;
  for (double a : angles) {
    c += std::cos(a * kDegToRad);
    s += std::sin(a * kDegToRad);
  }
  const double r = std::hypot(c, s) / static_cast<double>(angles.size());
  if (r >= 1.0) return 0.0;
  if (r <= 1e-12) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(r)) / kDegToRad;
}

std::vector<AnglePrediction> predict_from_observations(
    std::string_view sequence, std::span<const std::vector<DihedralObservation>> observations,
    std::size_t k, const KdeConfig& kde, std::vector<std::optional<DensityGrid>>* grids) {
  std::vector<AnglePrediction> out;
  out.reserve(sequence.size());
  if (grids) grids->assign(sequence.size(), std::nullopt);

  for (std::size_t r = 0; r < sequence.size(); ++r) {
    AnglePrediction p;
    p.residue_index = r;
    p.residue = sequence[r];
    p.window_size = k;
    p.phi_terminus = r == 0;
    p.psi_terminus = r + 1 == sequence.size();
    const auto& obs = observations[r];
    p.observation_count = obs.size();
    if (!obs.empty()) {
      std::vector<AnglePair> pairs;
      pairs.reserve(obs.size());
      for (const auto& o : obs) pairs.push_back({o.phi, o.psi});
      DensityGrid grid = estimate_density(pairs, kde);
      const GridPeak peak = argmax(grid);
      p.has_data = true;
      p.phi = peak.phi;
      p.psi = peak.psi;
      p.density_at_peak = peak.density;
      if (grids) (*grids)[r] = std::move(grid);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<AnglePrediction> predict_sequence(std::string_view sequence, const TorsionStore& store,
                                              const PredictConfig& config,
                                              std::vector<std::optional<DensityGrid>>* grids) {
  const auto observations = consolidate(sequence, config.k, store, config.consolidate);
  return predict_from_observations(sequence, observations, config.k, config.kde, grids);
}

RSpace export_rspace(std::string_view kmer, std::size_t offset, const TorsionStore& store,
                     const KdeConfig& kde, const QueryFilter& filter) {
  validate_kmer(kmer);
  if (offset >= kmer.size()) {
    throw Error(ErrorCode::kInvalidArgument, "offset " + std::to_string(offset) +
                                                 " is outside a k-mer of length " +
                                                 std::to_string(kmer.size()));
  }
  auto windows = run_windows(kmer, kmer.size(), store, filter);
  WindowResult& hits = windows.front();
  if (hits.occurrences.empty()) {
    throw Error(ErrorCode::kNoMatches, "'" + std::string(kmer) + "' does not occur in the store");
  }
  std::vector<AnglePair> observations;
  for (const auto& t : hits.torsions) {
    const auto& pair = t[offset];
    if (!std::isnan(pair.phi) && !std::isnan(pair.psi)) observations.push_back({pair.phi, pair.psi});
  }
  DensityGrid grid = estimate_density(observations, kde);
  return RSpace{std::move(hits), std::move(observations), std::move(grid)};
}

std::string format_grid_csv(const DensityGrid& grid) {
  std::string out = "phi,psi,density\n";
  const std::size_t n = grid.cells_per_axis();
  out.reserve(out.size() + n * n * 32);
  char buf[96];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.9e\n", grid.center(i), grid.center(j), grid.at(i, j));
      out += buf;
    }
  }
  return out;
}

std::string format_predictions_csv(std::span<const AnglePrediction> predictions) {
  std::string out(kPredictionCsvHeader);
  out += '\n';
  for (const auto& p : predictions) {
    std::string flags;
    auto add = [&flags](const char* f) {
      if (!flags.empty()) flags += ';';
      flags += f;
    };
    if (!p.has_data) add("NODATA");
    if (p.phi_terminus) add("PHI_TERMINUS");
    if (p.psi_terminus) add("PSI_TERMINUS");

    out += std::to_string(p.residue_index);
    out += ',';
    out += p.residue;
    out += ',';
    out += p.has_data ? fixed4(p.phi) : std::string();
    out += ',';
    out += p.has_data ? fixed4(p.psi) : std::string();
    out += ',';
    out += p.has_data ? general(p.density_at_peak) : std::string();
    out += ',';
    out += std::to_string(p.observation_count);
    out += ',';
    out += flags;
    out += '\n';
  }
  return out;
}

std::vector<PredictionRow> parse_predictions_csv(std::string_view text) {
  std::vector<PredictionRow> rows;
  std::vector<std::string_view> header;
  int col_index = -1, col_residue = -1, col_phi = -1, col_psi = -1, col_omega = -1, col_flags = -1;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto fields = split_commas(line);
    if (header.empty()) {
      header = fields;
      for (int c = 0; c < static_cast<int>(fields.size()); ++c) {
        const auto name = fields[static_cast<std::size_t>(c)];
        if (name == "index") col_index = c;
        else if (name == "residue") col_residue = c;
        else if (name == "phi") col_phi = c;
        else if (name == "psi") col_psi = c;
        else if (name == "omega") col_omega = c;
        else if (name == "flags") col_flags = c;
      }
      if (col_index < 0 || col_residue < 0 || col_phi < 0 || col_psi < 0) {
        throw Error(ErrorCode::kInvalidArgument, "angle table needs index,residue,phi,psi columns");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kInvalidArgument, "wrong field count in: " + std::string(line));
    }
    auto field = [&fields](int c) { return fields[static_cast<std::size_t>(c)]; };
    PredictionRow row;
    const auto idx = optional_number(field(col_index), line);
    if (!idx || *idx < 0) throw Error(ErrorCode::kInvalidArgument, "bad index in: " + std::string(line));
    row.index = static_cast<std::size_t>(*idx);
    row.residue = field(col_residue).size() == 1 ? field(col_residue)[0] : 'X';
    if (field(col_residue).size() == 3) row.residue = three_to_one(field(col_residue));
    row.phi = optional_number(field(col_phi), line);
    row.psi = optional_number(field(col_psi), line);
    if (col_omega >= 0) row.omega = optional_number(field(col_omega), line);
    if (col_flags >= 0) row.no_data = field(col_flags).find("NODATA") != std::string_view::npos;
    rows.push_back(row);
  }
  if (header.empty()) throw Error(ErrorCode::kInvalidArgument, "empty angle table");
  return rows;
}

}  // namespace pdbmine
