// Copyright 2026 The privmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef PRIVMAP_DATA_HPP_
#define PRIVMAP_DATA_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "privmap/oracle.hpp"
#include "privmap/risk.hpp"

namespace privmap {

enum class SyntheticKind { kBinaryTable3, kMarySec4a3 };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kBinaryTable3;
  int n_train = 80;
  int n_test = 1000;
  double rho = 0.0;   // binary kind: correlation of (H, G)
  double p_h1 = 0.5;  // prior P(H = +1)
  double p_g1 = 0.5;  // prior P(G = +1)
  int m = 3;          // m-ary kind: private alphabet size
  std::uint64_t seed = 0;
};

struct Dataset {
  TrainingSet train;
  TrainingSet test;
  JointModel joint;
  int x_offset = 0;  // affine shift applied to raw observation values
};

// Four sensors observing 2/4/6/8 + uniform {-1,0,+1} noise per (H,G) cell,
// clamped to the alphabet {1..8}; (H,G) joint built from the priors and a
// single correlation tilt. The exact JointModel ships with the samples.
Dataset gen_binary(const SyntheticSpec& spec);

// m-ary private hypothesis: 4 + m sensors, uniform uncorrelated (H,G); the
// last m sensors are one-hot active by (G,H) stratum. Observations are
// shifted to a dense 1-based alphabet (x_offset records the shift).
Dataset gen_mary(const SyntheticSpec& spec);

// --- CSV ingestion -------------------------------------------------------

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string h_column;
  std::string h_positive;  // cell value mapped to +1; all others to -1
  std::string g_column;
  std::map<std::string, int> g_map;  // raw value -> class index
};

enum class Discretization { kEqualWidth, kEqualFrequency };

// Per-feature discretization: numeric columns carry internal cut points
// (bin of v = 1 + #cuts below v); categorical columns map values by
// dictionary order.
struct ColumnBins {
  bool categorical = false;
  std::vector<double> cuts;
  std::vector<std::string> categories;

  int bin_of_numeric(double v) const;
  int bin_of_category(const std::string& v) const;  // SchemaError if unseen
};

struct IngestResult {
  TrainingSet ts;
  std::vector<ColumnBins> bins;
  int dropped_rows = 0;
};

// Reads a headered CSV, drops rows with missing values ("" or "?") in the
// selected columns, discretizes numeric features to {1..levels}, and maps
// labels per the schema.
IngestResult ingest_csv(const std::string& path, const CsvSchema& schema,
                        int levels, Discretization strategy);
// Same, but reusing previously computed bins (e.g. for a test split).
IngestResult ingest_csv_with_bins(const std::string& path,
                                  const CsvSchema& schema,
                                  const std::vector<ColumnBins>& bins);

struct SplitIngestResult {
  TrainingSet train;
  TrainingSet test;
  std::vector<ColumnBins> bins;
  int dropped_rows = 0;
};

// Shuffled train/test row split; bins are fitted on the training split and
// applied to both. n_test = 0 takes the remainder. Training splits missing
// a declared class are redrawn (up to 100 shuffles).
SplitIngestResult ingest_csv_split(const std::string& path,
                                   const CsvSchema& schema, int levels,
                                   Discretization strategy, int n_train,
                                   int n_test, std::uint64_t seed);

void save_bins(const std::string& path, const std::vector<ColumnBins>& bins);
std::vector<ColumnBins> load_bins(const std::string& path);

}  // namespace privmap

#endif  // PRIVMAP_DATA_HPP_
