// SPDX-License-Identifier: Apache-2.0
#include "beampred/dataset.hpp"

#include <beampred/error.hpp>
#include <beampred/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <system_error>

namespace beampred {

std::size_t feature_dim(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::Position: return 2;
    case FeatureSet::PositionHeight: return 3;
    case FeatureSet::PositionHeightDistance: return 4;
    case FeatureSet::Visual: return 3;
  }
  return 0;
}

std::string_view feature_set_name(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::Position: return "position";
    case FeatureSet::PositionHeight: return "position-height";
    case FeatureSet::PositionHeightDistance: return "position-height-distance";
    case FeatureSet::Visual: return "visual";
  }
  return "unknown";
}

FeatureSet parse_feature_set(std::string_view name) {
  for (FeatureSet fs : kAllFeatureSets) {
    if (feature_set_name(fs) == name) return fs;
  }
  throw std::invalid_argument("unknown feature set '" + std::string(name) + "'");
}

std::optional<Eigen::VectorXd> extract_features(const SensorSample& sample, FeatureSet fs) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(feature_dim(fs)));
  switch (fs) {
    case FeatureSet::Visual:
      if (!sample.visual_uv || !sample.visual_size) return std::nullopt;
      f << sample.visual_uv->x(), sample.visual_uv->y(), *sample.visual_size;
      return f;
    case FeatureSet::Position:
      f << sample.gps.x(), sample.gps.y();
      return f;
    case FeatureSet::PositionHeight:
      f << sample.gps.x(), sample.gps.y(), sample.height_m;
      return f;
    case FeatureSet::PositionHeightDistance:
      f << sample.gps.x(), sample.gps.y(), sample.height_m, sample.distance_m;
      return f;
  }
  return std::nullopt;
}

BuildResult build_examples(std::span<const SensorSample> samples,
                           std::span<const PowerVector> powers, FeatureSet fs) {
  if (samples.size() != powers.size())
    throw std::invalid_argument("sample and power vector counts differ");
  BuildResult result;
  result.examples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto features = extract_features(samples[i], fs);
    if (!features) {
      ++result.dropped;
      continue;
    }
    LabeledExample ex;
    ex.features = std::move(*features);
    ex.label = optimal_beam(powers[i]);
    ex.meta = {samples[i].height_m, samples[i].speed_mps, samples[i].distance_m};
    ex.source_index = i;
    ex.time_s = samples[i].time_s;
    result.examples.push_back(std::move(ex));
  }
  return result;
}

PowerVector to_active_codebook(const PowerVector& pv, std::size_t q) {
  if (q == 0 || pv.size() == 0) throw std::invalid_argument("empty codebook");
  if (pv.size() == q) return pv;
  if (pv.size() % q != 0)
    throw DataError("power vector of length " + std::to_string(pv.size()) +
                    " cannot be reduced to " + std::to_string(q) + " beams");
  const std::size_t ratio = pv.size() / q;
  const auto p = pv.powers();
  if (std::count_if(p.begin(), p.end(), [](double x) { return x != 0.0; }) == 1) {
    std::vector<double> one_hot(q, 0.0);
    one_hot[optimal_beam(pv).index / ratio] = 1.0;
    return PowerVector(std::move(one_hot));
  }
  return downsample_power(pv, ratio);
}

Normalizer Normalizer::fit(std::span<const LabeledExample> train) {
  if (train.empty()) throw std::invalid_argument("cannot fit a normalizer on an empty split");
  const auto dim = train.front().features.size();
  std::vector<FeatureRange> ranges(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    double lo = train.front().features[j];
    double hi = lo;
    for (const auto& ex : train) {
      if (ex.features.size() != dim) throw std::invalid_argument("inconsistent feature dimension");
      lo = std::min(lo, ex.features[j]);
      hi = std::max(hi, ex.features[j]);
    }
    ranges[static_cast<std::size_t>(j)] = {lo, hi, !(lo < hi)};
  }
  return Normalizer(std::move(ranges));
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& raw) const {
  if (static_cast<std::size_t>(raw.size()) != ranges_.size())
    throw std::invalid_argument("feature dimension does not match the normalizer");
  Eigen::VectorXd out(raw.size());
  for (std::size_t j = 0; j < ranges_.size(); ++j) {
    const auto& r = ranges_[j];
    const auto idx = static_cast<Eigen::Index>(j);
    out[idx] = r.constant ? 0.5 : std::clamp((raw[idx] - r.min) / (r.max - r.min), 0.0, 1.0);
  }
  return out;
}

bool Normalizer::has_constant_feature() const {
  return std::any_of(ranges_.begin(), ranges_.end(), [](const auto& r) { return r.constant; });
}

std::string_view split_mode_name(SplitMode mode) {
  return mode == SplitMode::Random ? "random" : "temporal";
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "random") return SplitMode::Random;
  if (name == "temporal") return SplitMode::Temporal;
  throw std::invalid_argument("unknown split mode '" + std::string(name) + "'");
}

SplitIndices split_indices(std::size_t count, double train_fraction, std::uint64_t seed,
                           SplitMode mode, std::span<const double> times) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (count < 10) throw std::invalid_argument("need at least 10 examples to split");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::Random) {
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
  } else if (!times.empty()) {
    if (times.size() != count) throw std::invalid_argument("one timestamp per example required");
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  }
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(count)));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return out;
}

Dataset normalize(const Dataset& ds, const Normalizer& normalizer) {
  Dataset out = ds;
  for (auto& ex : out.examples) ex.features = normalizer.apply(ex.features);
  out.normalizer = normalizer;
  return out;
}

SplitDatasets split(const Dataset& ds, double train_fraction, std::uint64_t seed, SplitMode mode) {
  std::vector<double> times;
  times.reserve(ds.size());
  for (const auto& ex : ds.examples) times.push_back(ex.time_s);
  SplitDatasets out;
  out.indices = split_indices(ds.size(), train_fraction, seed, mode, times);

  const auto subset = [&](const std::vector<std::size_t>& idx) {
    Dataset part;
    part.feature_set = ds.feature_set;
    part.q = ds.q;
    part.split_seed = seed;
    part.examples.reserve(idx.size());
    for (std::size_t i : idx) part.examples.push_back(ds.examples[i]);
    return part;
  };
  const Dataset train_raw = subset(out.indices.train);
  const Normalizer normalizer = Normalizer::fit(train_raw.examples);
  out.train = normalize(train_raw, normalizer);
  out.test = normalize(subset(out.indices.test), normalizer);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

const std::vector<std::string> kRequiredColumns = {"lat", "lon", "height_m", "distance_m"};

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

SampleTable ingest_csv(std::istream& in, const ColumnMapping& mapping, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = split_csv_line(t);
    break;
  }
  if (header.empty()) throw DataError(source + ": missing header row");

  // external name -> schema name
  std::map<std::string, std::string> rename;
  for (const auto& [schema, external] : mapping.columns) rename[external] = schema;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name(trim(header[i]));
    if (auto it = rename.find(name); it != rename.end()) name = it->second;
    if (!column.emplace(name, i).second)
      throw DataError(source + ": duplicate column '" + name + "' in header");
  }
  for (const auto& req : kRequiredColumns) {
    if (!column.contains(req)) throw DataError(source + ": header lacks required column '" + req + "'");
  }

  std::vector<std::size_t> power_columns;
  for (std::size_t q = 0;; ++q) {
    auto it = column.find("p" + std::to_string(q));
    if (it == column.end()) break;
    power_columns.push_back(it->second);
  }
  const bool has_label = column.contains("beam_label");
  SampleTable table;
  if (power_columns.empty()) {
    if (!has_label) throw DataError(source + ": header has neither p0.. power columns nor beam_label");
    table.label_only = true;
    if (mapping.label_codebook_size < 2) throw DataError(source + ": label codebook size must be >= 2");
  } else if (power_columns.size() < 2) {
    throw DataError(source + ": need at least two power columns");
  }

  const auto optional_col = [&](const char* name) -> std::optional<std::size_t> {
    auto it = column.find(name);
    return it == column.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  const auto time_col = optional_col("time_s");
  const auto speed_col = optional_col("speed_mps");
  const auto u_col = optional_col("u");
  const auto v_col = optional_col("v");
  const auto size_col = optional_col("size");

  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    ++row_no;
    const auto cells = split_csv_line(t);
    const auto where = source + ": row " + std::to_string(row_no) + " (line " +
                       std::to_string(line_no) + ")";
    if (cells.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    const auto required = [&](const std::string& name) {
      auto value = parse_number(cells[column.at(name)]);
      if (!value || !std::isfinite(*value))
        throw DataError(where + ": column '" + name + "' is not a finite number");
      return *value;
    };
    const auto optional_value = [&](std::optional<std::size_t> col,
                                    const char* name) -> std::optional<double> {
      if (!col || trim(cells[*col]).empty()) return std::nullopt;
      auto value = parse_number(cells[*col]);
      if (!value) throw DataError(where + ": column '" + std::string(name) + "' is not a number");
      return value;
    };

    std::vector<double> powers;
    bool skip = false;
    if (table.label_only) {
      const double label = required("beam_label");
      if (label < 0 || label != std::floor(label) ||
          label >= static_cast<double>(mapping.label_codebook_size))
        throw DataError(where + ": beam_label out of range");
      powers.assign(mapping.label_codebook_size, 0.0);
      powers[static_cast<std::size_t>(label)] = 1.0;
    } else {
      powers.reserve(power_columns.size());
      for (std::size_t col : power_columns) {
        auto value = parse_number(cells[col]);
        if (!value || std::isnan(*value)) {
          skip = true;
          break;
        }
        if (*value < 0.0 || !std::isfinite(*value))
          throw DataError(where + ": power entries must be finite and nonnegative");
        powers.push_back(*value);
      }
    }
    if (skip) {
      ++table.skipped_rows;
      continue;
    }

    SensorSample s;
    s.gps = {required("lat"), required("lon")};
    s.height_m = required("height_m");
    s.distance_m = required("distance_m");
    s.time_s = optional_value(time_col, "time_s").value_or(static_cast<double>(row_no - 1));
    s.speed_mps = optional_value(speed_col, "speed_mps").value_or(0.0);
    const auto u = optional_value(u_col, "u");
    const auto v = optional_value(v_col, "v");
    const auto size = optional_value(size_col, "size");
    if (u && v && size) {
      s.visual_uv = Vec2{*u, *v};
      s.visual_size = *size;
    } else if (u || v || size) {
      throw DataError(where + ": visual fields u, v, size must be all present or all empty");
    }
    table.samples.push_back(s);
    table.powers.emplace_back(std::move(powers));
  }
  return table;
}

SampleTable ingest_csv(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  return ingest_csv(in, mapping, path.string());
}

ColumnMapping read_column_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open column mapping " + path.string());
  ColumnMapping mapping;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    if (key == "beam_label_codebook_size") {
      const auto n = parse_number(value);
      if (!n || *n < 2 || *n != std::floor(*n))
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": invalid codebook size");
      mapping.label_codebook_size = static_cast<std::size_t>(*n);
    } else {
      mapping.columns[key] = value;
    }
  }
  return mapping;
}

void write_csv(std::ostream& out, std::span<const SensorSample> samples,
               std::span<const PowerVector> powers, std::span<const std::string> comments,
               bool label_only) {
  if (samples.size() != powers.size())
    throw std::invalid_argument("sample and power vector counts differ");
  const std::size_t q = powers.empty() ? 0 : powers.front().size();
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "time_s,lat,lon,height_m,distance_m,speed_mps,u,v,size";
  if (label_only) {
    out << ",beam_label";
  } else {
    for (std::size_t i = 0; i < q; ++i) out << ",p" << i;
  }
  out << '\n';
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& s = samples[r];
    out << format_number(s.time_s) << ',' << format_number(s.gps.x()) << ','
        << format_number(s.gps.y()) << ',' << format_number(s.height_m) << ','
        << format_number(s.distance_m) << ',' << format_number(s.speed_mps) << ',';
    if (s.visual_uv && s.visual_size) {
      out << format_number(s.visual_uv->x()) << ',' << format_number(s.visual_uv->y()) << ','
          << format_number(*s.visual_size);
    } else {
      out << ",,";
    }
    if (label_only) {
      out << ',' << optimal_beam(powers[r]).index;
    } else {
      if (powers[r].size() != q) throw std::invalid_argument("power vectors differ in length");
      for (double p : powers[r].powers()) out << ',' << format_number(p);
    }
    out << '\n';
  }
}

}  // namespace beampred
