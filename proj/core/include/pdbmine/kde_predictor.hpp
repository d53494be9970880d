// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Joint (phi, psi) kernel density estimation on the torus and
// maximum-likelihood angle prediction.
//
// The kernel is a product of wrapped Gaussians, each normalized on the
// circle in radian measure and summed over +-2 turns. The bandwidth is the
// Gaussian standard deviation in degrees (default 10). There is no automatic
// bandwidth selection: it is a knob.

#ifndef PDBMINE_KDE_PREDICTOR_HPP_
#define PDBMINE_KDE_PREDICTOR_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdbmine/query_engine.hpp"

namespace pdbmine {

struct AnglePair {
  double phi = 0.0;
  double psi = 0.0;
};

struct KdeConfig {
  double bandwidth = 10.0;   // degrees
  double resolution = 1.0;   // degrees per cell; must divide 360
};

/// Density over phi in [-180, 180) x psi in [-180, 180). Cell (i, j) is
/// centered at (-180 + (i + 0.5) res, -180 + (j + 0.5) res); values are
/// stored phi-major.
class DensityGrid {
 public:
  DensityGrid(double resolution, double bandwidth, std::size_t observation_count,
              std::vector<double> values);

  double resolution() const { return resolution_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t observation_count() const { return observation_count_; }
  std::size_t cells_per_axis() const { return cells_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t phi_index, std::size_t psi_index) const {
    return values_[phi_index * cells_ + psi_index];
  }
  double center(std::size_t index) const {
    return -180.0 + (static_cast<double>(index) + 0.5) * resolution_;
  }
  /// Sum of values times cell area in radians squared.
  double integral() const;

 private:
  double resolution_;
  double bandwidth_;
  std::size_t observation_count_;
  std::size_t cells_;
  std::vector<double> values_;
};

/// Throws Error(kEmptyObservations) for no observations and
/// Error(kInvalidArgument) for a non-positive bandwidth or a resolution that
/// does not divide 360.
DensityGrid estimate_density(std::span<const AnglePair> observations, const KdeConfig& config = {});

struct GridPeak {
  std::size_t phi_index = 0;
  std::size_t psi_index = 0;
  double phi = 0.0;
  double psi = 0.0;
  double density = 0.0;
};

/// Cell with the largest value; ties go to the smallest phi index, then the
/// smallest psi index.
GridPeak argmax(const DensityGrid& grid);

/// Circular standard deviation sqrt(-2 ln R) in degrees; 0 for an empty set.
double circular_std_degrees(std::span<const double> angles);

struct AnglePrediction {
  std::size_t residue_index = 0;
  char residue = 'X';
  bool has_data = false;   // false marks a no-data prediction
  double phi = 0.0;        // cell center, degrees
  double psi = 0.0;
  double density_at_peak = 0.0;
  std::size_t observation_count = 0;
  std::size_t window_size = 0;
  bool phi_terminus = false;  // first residue: phi has no physical meaning
  bool psi_terminus = false;  // last residue: psi has no physical meaning
};

struct PredictConfig {
  std::size_t k = 3;
  KdeConfig kde;
  ConsolidateOptions consolidate;
};

/// Consolidates, estimates a density and takes the argmax for every residue.
/// Residues without observations come back with has_data == false. When
/// `grids` is given it receives the density of each residue (nullopt where
/// there was no data).
std::vector<AnglePrediction> predict_sequence(std::string_view sequence, const TorsionStore& store,
                                              const PredictConfig& config,
                                              std::vector<std::optional<DensityGrid>>* grids = nullptr);

/// Same as above from precomputed consolidated observations.
std::vector<AnglePrediction> predict_from_observations(
    std::string_view sequence, std::span<const std::vector<DihedralObservation>> observations,
    std::size_t k, const KdeConfig& kde, std::vector<std::optional<DensityGrid>>* grids = nullptr);

struct RSpace {
  WindowResult hits;
  std::vector<AnglePair> observations;  // defined pairs at the requested offset
  DensityGrid grid;
};

/// Density of every store observation of `kmer` at `offset`. Throws
/// Error(kNoMatches) when the k-mer does not occur, Error(kInvalidArgument)
/// for an offset outside the k-mer.
RSpace export_rspace(std::string_view kmer, std::size_t offset, const TorsionStore& store,
                     const KdeConfig& kde = {}, const QueryFilter& filter = {});

/// "phi,psi,density" then one row per cell, phi-major.
std::string format_grid_csv(const DensityGrid& grid);

inline constexpr std::string_view kPredictionCsvHeader = "index,residue,phi,psi,peak_density,n_obs,flags";

/// Prediction table; no-data rows have empty angle fields and the NODATA
/// flag. Flags are ';'-separated from {NODATA, PHI_TERMINUS, PSI_TERMINUS}.
std::string format_predictions_csv(std::span<const AnglePrediction> predictions);

struct PredictionRow {
  std::size_t index = 0;
  char residue = 'X';
  std::optional<double> phi;
  std::optional<double> psi;
  std::optional<double> omega;  // only present when the file carries an omega column
  bool no_data = false;
};

/// Reads a prediction table (or any CSV with index,residue,phi,psi columns
/// and an optional omega or flags column). Throws Error(kInvalidArgument).
std::vector<PredictionRow> parse_predictions_csv(std::string_view text);

}  // namespace pdbmine

#endif  // PDBMINE_KDE_PREDICTOR_HPP_
