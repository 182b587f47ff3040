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
#include "privmap/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "privmap/errors.hpp"

namespace privmap {

namespace {

// Sample a training split; private (and public) classes must all appear.
TrainingSet sample_split(const JointModel& jm, int n, Rng& rng,
                         bool require_all_classes) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    TrainingSet ts;
    ts.xs.reserve(n);
    ts.hs.reserve(n);
    ts.gs.reserve(n);
    for (int i = 0; i < n; ++i) {
      const auto sample = jm.sample(rng);
      ts.xs.push_back(sample.x);
      ts.hs.push_back(jm.h_vals[sample.hi]);
      ts.gs.push_back(jm.g_vals[sample.gi]);
    }
    if (!require_all_classes) return ts;
    std::set<int> gseen(ts.gs.begin(), ts.gs.end());
    std::set<int> hseen(ts.hs.begin(), ts.hs.end());
    if (static_cast<int>(gseen.size()) == jm.g_count() &&
        static_cast<int>(hseen.size()) == jm.h_count())
      return ts;
  }
  throw DomainError("could not draw a split containing every class");
}

}  // namespace

Dataset gen_binary(const SyntheticSpec& spec) {
  Dataset out;
  JointModel& jm = out.joint;
  jm.s = 4;
  jm.x_card = 8;
  jm.h_vals = {-1, 1};
  jm.g_vals = {-1, 1};

  const double ph[2] = {1.0 - spec.p_h1, spec.p_h1};
  const double pg[2] = {1.0 - spec.p_g1, spec.p_g1};
  const double tilt =
      spec.rho * std::sqrt(ph[0] * ph[1] * pg[0] * pg[1]);
  jm.p_hg.resize(4);
  for (int hi = 0; hi < 2; ++hi)
    for (int gi = 0; gi < 2; ++gi) {
      const double h = jm.h_vals[hi], g = jm.g_vals[gi];
      const double cell = ph[hi] * pg[gi] + h * g * tilt;
      if (cell < 0.0)
        throw InfeasibleCorrelation("rho " + std::to_string(spec.rho) +
                                    " incompatible with the priors");
      jm.p_hg[hi * 2 + gi] = cell;
    }

  // Sensor observations: base + uniform {-1,0,+1} noise, clamped to {1..8}.
  jm.cond.assign(4, std::vector<double>(2 * 2 * 8, 0.0));
  for (int hi = 0; hi < 2; ++hi)
    for (int gi = 0; gi < 2; ++gi) {
      const int base = 2 + 4 * hi + 2 * gi;  // 2, 4, 6, 8 per Table rows
      for (int noise = -1; noise <= 1; ++noise) {
        const int x = std::clamp(base + noise, 1, 8);
        for (int t = 0; t < 4; ++t)
          jm.cond[t][(hi * 2 + gi) * 8 + (x - 1)] += 1.0 / 3.0;
      }
    }
  jm.validate();

  Rng rng(spec.seed);
  out.train = sample_split(jm, spec.n_train, rng, true);
  out.test = sample_split(jm, spec.n_test, rng, false);
  return out;
}

Dataset gen_mary(const SyntheticSpec& spec) {
  if (spec.m < 3) throw ConfigError("m-ary generator requires m >= 3");
  const int m = spec.m;
  Dataset out;
  out.x_offset = 3;  // makes the smallest raw value (-2) map to 1
  JointModel& jm = out.joint;
  jm.s = 4 + m;
  jm.x_card = 4 * m + 4;
  jm.h_vals = {-1, 1};
  jm.g_vals.resize(m);
  for (int g = 0; g < m; ++g) jm.g_vals[g] = g;
  jm.p_hg.assign(2 * m, 1.0 / (2.0 * m));

  jm.cond.assign(jm.s, std::vector<double>(2 * m * jm.x_card, 0.0));
  for (int hi = 0; hi < 2; ++hi) {
    const int h = jm.h_vals[hi];
    for (int g = 0; g < m; ++g) {
      // First four sensors: m(H+1) + 2(G+1) + noise.
      const int base = m * (h + 1) + 2 * (g + 1) + out.x_offset;
      for (int t = 0; t < 4; ++t)
        for (int noise = -1; noise <= 1; ++noise)
          jm.cond[t][(hi * m + g) * jm.x_card + (base + noise - 1)] += 1.0 / 3.0;
      // Stratum-indicator sensors: H + noise when active, 0 otherwise.
      // g - h/2 - 0.5 reduces to g-1 for h=+1 and g for h=-1.
      const int active = ((g - (h + 1) / 2) % m + m) % m;
      for (int k = 0; k < m; ++k) {
        const int t = 4 + k;
        if (k == active) {
          for (int noise = -1; noise <= 1; ++noise)
            jm.cond[t][(hi * m + g) * jm.x_card +
                       (h + noise + out.x_offset - 1)] += 1.0 / 3.0;
        } else {
          jm.cond[t][(hi * m + g) * jm.x_card + (out.x_offset - 1)] = 1.0;
        }
      }
    }
  }
  jm.validate();

  Rng rng(spec.seed);
  out.train = sample_split(jm, spec.n_train, rng, true);
  out.test = sample_split(jm, spec.n_test, rng, false);
  return out;
}

// --- CSV ingestion -------------------------------------------------------

namespace {

std::string trim(const std::string& text) {
  std::size_t b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

bool parse_double(const std::string& cell, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(cell, &pos);
    return pos == cell.size();
  } catch (const std::exception&) {
    return false;
  }
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file " + path);
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    table.rows.push_back(split_csv_line(line));
  }
  return table;
}

int column_index(const RawTable& table, const std::string& name) {
  for (std::size_t k = 0; k < table.header.size(); ++k)
    if (table.header[k] == name) return static_cast<int>(k);
  throw SchemaError("column not found: " + name);
}

struct SelectedRows {
  std::vector<std::vector<std::string>> features;  // row-major
  std::vector<int> hs;
  std::vector<int> gs;
  int dropped = 0;
};

SelectedRows select_rows(const RawTable& table, const CsvSchema& schema) {
  std::vector<int> fcols;
  for (const auto& name : schema.feature_columns)
    fcols.push_back(column_index(table, name));
  const int hcol = column_index(table, schema.h_column);
  const int gcol = column_index(table, schema.g_column);

  SelectedRows out;
  for (const auto& row : table.rows) {
    bool missing = false;
    for (int col : fcols)
      if (col >= static_cast<int>(row.size()) || is_missing(row[col]))
        missing = true;
    if (hcol >= static_cast<int>(row.size()) || is_missing(row[hcol]) ||
        gcol >= static_cast<int>(row.size()) || is_missing(row[gcol]))
      missing = true;
    if (missing) {
      ++out.dropped;
      continue;
    }
    std::vector<std::string> feats;
    for (int col : fcols) feats.push_back(row[col]);
    out.features.push_back(std::move(feats));
    out.hs.push_back(row[hcol] == schema.h_positive ? 1 : -1);
    const auto it = schema.g_map.find(row[gcol]);
    if (it == schema.g_map.end())
      throw SchemaError("unmapped private-label value: " + row[gcol]);
    out.gs.push_back(it->second);
  }
  if (out.features.empty())
    throw EmptyAfterFiltering("no usable rows in the file");
  return out;
}

}  // namespace

int ColumnBins::bin_of_numeric(double v) const {
  int bin = 1;
  for (double cut : cuts)
    if (v > cut) ++bin;
  return bin;
}

int ColumnBins::bin_of_category(const std::string& v) const {
  const auto it = std::lower_bound(categories.begin(), categories.end(), v);
  if (it == categories.end() || *it != v)
    throw SchemaError("unseen category: " + v);
  return static_cast<int>(it - categories.begin()) + 1;
}

namespace {

ColumnBins fit_column(const std::vector<std::string>& values, int levels,
                      Discretization strategy) {
  ColumnBins bins;
  std::vector<double> numeric(values.size());
  bool all_numeric = true;
  for (std::size_t i = 0; i < values.size() && all_numeric; ++i)
    all_numeric = parse_double(values[i], &numeric[i]);

  if (!all_numeric) {
    bins.categorical = true;
    std::set<std::string> distinct(values.begin(), values.end());
    bins.categories.assign(distinct.begin(), distinct.end());
    return bins;
  }

  if (strategy == Discretization::kEqualWidth) {
    const auto [mn_it, mx_it] = std::minmax_element(numeric.begin(), numeric.end());
    const double width = (*mx_it - *mn_it) / levels;
    for (int k = 1; k < levels; ++k) bins.cuts.push_back(*mn_it + k * width);
  } else {
    std::vector<double> sorted(numeric);
    std::sort(sorted.begin(), sorted.end());
    const int n = static_cast<int>(sorted.size());
    for (int k = 1; k < levels; ++k) {
      int pos = static_cast<int>(static_cast<std::int64_t>(k) * n / levels);
      pos = std::min(pos, n - 1);
      bins.cuts.push_back(sorted[pos]);
    }
  }
  return bins;
}

// drop_unseen counts and skips rows whose categorical value was not seen
// when the bins were fitted (reuse on another split); by default such rows
// raise SchemaError.
TrainingSet apply_bins(const SelectedRows& rows,
                       const std::vector<ColumnBins>& bins,
                       int* drop_unseen = nullptr) {
  TrainingSet ts;
  ts.xs.reserve(rows.features.size());
  for (std::size_t i = 0; i < rows.features.size(); ++i) {
    const auto& feats = rows.features[i];
    std::vector<int> x(feats.size());
    bool ok = true;
    for (std::size_t f = 0; f < feats.size() && ok; ++f) {
      if (bins[f].categorical) {
        if (drop_unseen != nullptr) {
          try {
            x[f] = bins[f].bin_of_category(feats[f]);
          } catch (const SchemaError&) {
            ok = false;
            ++*drop_unseen;
          }
        } else {
          x[f] = bins[f].bin_of_category(feats[f]);
        }
      } else {
        double value = 0.0;
        if (!parse_double(feats[f], &value))
          throw SchemaError("non-numeric value in numeric column: " + feats[f]);
        x[f] = bins[f].bin_of_numeric(value);
      }
    }
    if (!ok) continue;
    ts.xs.push_back(std::move(x));
    ts.hs.push_back(rows.hs[i]);
    ts.gs.push_back(rows.gs[i]);
  }
  return ts;
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema,
                        int levels, Discretization strategy) {
  if (levels < 1) throw ConfigError("levels must be positive");
  const auto table = read_csv(path);
  const auto rows = select_rows(table, schema);

  IngestResult out;
  out.dropped_rows = rows.dropped;
  const std::size_t fcount = schema.feature_columns.size();
  out.bins.resize(fcount);
  for (std::size_t f = 0; f < fcount; ++f) {
    std::vector<std::string> column(rows.features.size());
    for (std::size_t i = 0; i < rows.features.size(); ++i)
      column[i] = rows.features[i][f];
    out.bins[f] = fit_column(column, levels, strategy);
  }
  out.ts = apply_bins(rows, out.bins);
  return out;
}

IngestResult ingest_csv_with_bins(const std::string& path,
                                  const CsvSchema& schema,
                                  const std::vector<ColumnBins>& bins) {
  if (bins.size() != schema.feature_columns.size())
    throw SchemaError("bin metadata does not match the feature columns");
  const auto table = read_csv(path);
  const auto rows = select_rows(table, schema);
  IngestResult out;
  out.dropped_rows = rows.dropped;
  out.bins = bins;
  out.ts = apply_bins(rows, bins);
  return out;
}

SplitIngestResult ingest_csv_split(const std::string& path,
                                   const CsvSchema& schema, int levels,
                                   Discretization strategy, int n_train,
                                   int n_test, std::uint64_t seed) {
  if (levels < 1) throw ConfigError("levels must be positive");
  if (n_train < 1) throw ConfigError("n_train must be positive");
  const auto table = read_csv(path);
  const auto rows = select_rows(table, schema);
  const int total = static_cast<int>(rows.features.size());
  if (n_train >= total)
    throw EmptyAfterFiltering("not enough rows for the requested split");
  const int test_count =
      n_test > 0 ? std::min(n_test, total - n_train) : total - n_train;

  std::set<int> declared;
  for (int g : rows.gs) declared.insert(g);

  Rng rng(seed);
  std::vector<int> order(total);
  for (int i = 0; i < total; ++i) order[i] = i;
  for (int attempt = 0; attempt < 100; ++attempt) {
    // Fisher-Yates
    for (int i = total - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(0, i)]);
    std::set<int> train_g, train_h;
    for (int i = 0; i < n_train; ++i) {
      train_g.insert(rows.gs[order[i]]);
      train_h.insert(rows.hs[order[i]]);
    }
    if (train_g.size() == declared.size() && train_h.size() == 2) {
      SelectedRows train_rows, test_rows;
      for (int i = 0; i < n_train; ++i) {
        const int r = order[i];
        train_rows.features.push_back(rows.features[r]);
        train_rows.hs.push_back(rows.hs[r]);
        train_rows.gs.push_back(rows.gs[r]);
      }
      for (int i = n_train; i < n_train + test_count; ++i) {
        const int r = order[i];
        test_rows.features.push_back(rows.features[r]);
        test_rows.hs.push_back(rows.hs[r]);
        test_rows.gs.push_back(rows.gs[r]);
      }
      SplitIngestResult out;
      out.dropped_rows = rows.dropped;
      const std::size_t fcount = schema.feature_columns.size();
      out.bins.resize(fcount);
      for (std::size_t f = 0; f < fcount; ++f) {
        std::vector<std::string> column(train_rows.features.size());
        for (std::size_t i = 0; i < train_rows.features.size(); ++i)
          column[i] = train_rows.features[i][f];
        out.bins[f] = fit_column(column, levels, strategy);
      }
      out.train = apply_bins(train_rows, out.bins);
      out.test = apply_bins(test_rows, out.bins);
      return out;
    }
  }
  throw DomainError("could not draw a training split containing every class");
}

void save_bins(const std::string& path, const std::vector<ColumnBins>& bins) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& b : bins) {
    nlohmann::json entry;
    entry["categorical"] = b.categorical;
    entry["cuts"] = b.cuts;
    entry["categories"] = b.categories;
    doc.push_back(entry);
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

std::vector<ColumnBins> load_bins(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  std::vector<ColumnBins> bins;
  for (const auto& entry : doc) {
    ColumnBins b;
    b.categorical = entry.at("categorical").get<bool>();
    b.cuts = entry.at("cuts").get<std::vector<double>>();
    b.categories = entry.at("categories").get<std::vector<std::string>>();
    bins.push_back(std::move(b));
  }
  return bins;
}

}  // namespace privmap
