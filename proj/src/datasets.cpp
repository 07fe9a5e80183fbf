#include "spikerobust/datasets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spikerobust/error.hpp"
#include "spikerobust/keyvalue.hpp"
#include "spikerobust/random.hpp"

namespace spikerobust {

namespace {

std::vector<std::string> split_line(const std::string& line, Delimiter delimiter) {
  std::vector<std::string> cells;
  if (delimiter == Delimiter::kWhitespace) {
    std::istringstream in(line);
    std::string cell;
    while (in >> cell) cells.push_back(cell);
    return cells;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string cell = line.substr(start, comma - start);
    const auto first = cell.find_first_not_of(" \t\r\"");
    const auto last = cell.find_last_not_of(" \t\r\"");
    cells.push_back(first == std::string::npos ? std::string()
                                               : cell.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::optional<double> to_number(const std::string& cell) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) return std::nullopt;
  return value;
}

std::size_t resolve_column(int column, std::size_t width) {
  const long index = column < 0 ? static_cast<long>(width) + column : column;
  return static_cast<std::size_t>(index);
}

std::map<std::size_t, std::vector<std::size_t>> by_class(const TabularDataset& dataset) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) groups[dataset.labels[i]].push_back(i);
  return groups;
}

TabularDataset select_rows(const TabularDataset& dataset, std::vector<std::size_t> rows,
                           const std::string& split_tag) {
  std::sort(rows.begin(), rows.end());
  TabularDataset out;
  out.name = dataset.name;
  out.split = split_tag;
  out.class_names = dataset.class_names;
  out.dropped_rows = dataset.dropped_rows;
  for (std::size_t r : rows) {
    out.features.push_back(dataset.features[r]);
    out.labels.push_back(dataset.labels[r]);
  }
  return out;
}

}  // namespace

void TabularDataset::validate() const {
  check(!labels.empty(), ErrorCode::kEmptyDataset, "dataset '" + name + "' is empty");
  check(features.size() == labels.size(), ErrorCode::kMalformedInput,
        "feature and label counts differ");
  const std::size_t width = features.front().size();
  for (std::size_t i = 0; i < size(); ++i) {
    check(features[i].size() == width, ErrorCode::kMalformedInput, "ragged feature matrix");
    check(labels[i] < class_names.size(), ErrorCode::kMalformedInput, "label out of range");
    for (double v : features[i]) {
      check(std::isfinite(v), ErrorCode::kMalformedInput, "non-finite feature value");
    }
  }
}

FeatureStats compute_stats(const TabularDataset& dataset) {
  dataset.validate();
  FeatureStats stats;
  stats.min = dataset.features.front();
  stats.max = dataset.features.front();
  for (const auto& row : dataset.features) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      stats.min[c] = std::min(stats.min[c], row[c]);
      stats.max[c] = std::max(stats.max[c], row[c]);
    }
  }
  for (std::size_t c = 0; c < stats.min.size(); ++c) {
    if (!(stats.max[c] > stats.min[c])) {
      stats.min[c] -= 0.5;
      stats.max[c] += 0.5;
    }
  }
  return stats;
}

CsvSchema iris_schema() { return {}; }

CsvSchema wbc_schema() {
  CsvSchema schema;
  schema.ignore_columns = {0};
  schema.class_order = {"2", "4"};
  return schema;
}

CsvSchema landsat_schema() {
  CsvSchema schema;
  schema.delimiter = Delimiter::kWhitespace;
  schema.class_order = {"1", "2", "3", "4", "5", "7"};
  schema.landsat_average = true;
  return schema;
}

TabularDataset load_xor() {
  TabularDataset ds;
  ds.name = "xor";
  ds.split = "all";
  ds.class_names = {"same", "different"};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      ds.features.push_back({static_cast<double>(a), static_cast<double>(b)});
      ds.labels.push_back(a == b ? 0 : 1);
    }
  }
  return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());

  TabularDataset ds;
  ds.name = path.stem().string();
  ds.split = "all";
  ds.class_names = schema.class_order;
  std::map<std::string, std::size_t> label_index;
  for (std::size_t c = 0; c < schema.class_order.size(); ++c) {
    label_index[schema.class_order[c]] = c;
  }

  std::string line;
  std::size_t number = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line)) continue;
    const auto cells = split_line(line, schema.delimiter);
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw Error(ErrorCode::kParseError,
                  "expected " + std::to_string(width) + " columns, found " +
                      std::to_string(cells.size()),
                  number);
    }
    const std::size_t label_col = resolve_column(schema.label_column, width);
    if (label_col >= width) throw Error(ErrorCode::kParseError, "label column out of range", number);

    std::vector<double> row;
    bool missing = false;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) continue;
      const bool ignored = std::any_of(
          schema.ignore_columns.begin(), schema.ignore_columns.end(),
          [&](int ignore) { return resolve_column(ignore, width) == c; });
      if (ignored) continue;
      if (cells[c] == schema.missing_token) {
        missing = true;
        continue;
      }
      const auto value = to_number(cells[c]);
      if (!value) {
        throw Error(ErrorCode::kParseError,
                    "non-numeric value '" + cells[c] + "' in column " + std::to_string(c + 1),
                    number);
      }
      row.push_back(*value);
    }
    const std::string& label = cells[label_col];
    if (missing || label == schema.missing_token) {
      ++ds.dropped_rows;
      continue;
    }
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      if (!schema.class_order.empty()) {
        throw Error(ErrorCode::kParseError, "unknown class label '" + label + "'", number);
      }
      it = label_index.emplace(label, ds.class_names.size()).first;
      ds.class_names.push_back(label);
    }
    if (schema.landsat_average) {
      try {
        const auto bands = landsat_average_pixel(row);
        row.assign(bands.begin(), bands.end());
      } catch (const Error& e) {
        throw Error(ErrorCode::kParseError, e.what(), number);
      }
    }
    ds.features.push_back(std::move(row));
    ds.labels.push_back(it->second);
  }
  if (ds.labels.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no usable rows in " + path.string());
  }
  ds.validate();
  return ds;
}

std::array<double, 4> landsat_average_pixel(std::span<const double> values) {
  if (values.size() != 36) {
    throw Error(ErrorCode::kMalformedCase,
                "Landsat case needs 36 values, got " + std::to_string(values.size()));
  }
  std::array<double, 4> bands{};
  for (std::size_t pixel = 0; pixel < 9; ++pixel) {
    for (std::size_t band = 0; band < 4; ++band) bands[band] += values[pixel * 4 + band];
  }
  for (double& b : bands) b /= 9.0;
  return bands;
}

std::pair<TabularDataset, TabularDataset> split(const TabularDataset& dataset,
                                                double ratio, std::uint64_t seed) {
  check(ratio > 0.0 && ratio < 1.0, ErrorCode::kConfigError, "split ratio must lie in (0, 1)");
  dataset.validate();
  Rng rng = make_rng(seed, 0x5b11);
  std::vector<std::size_t> first, second;
  for (auto& [label, rows] : by_class(dataset)) {
    if (rows.size() < 2) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class '" + dataset.class_names[label] + "' has fewer than 2 samples");
    }
    shuffle(rows.begin(), rows.end(), rng);
    auto take = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(rows.size())));
    take = std::clamp<std::size_t>(take, 1, rows.size() - 1);
    first.insert(first.end(), rows.begin(), rows.begin() + static_cast<long>(take));
    second.insert(second.end(), rows.begin() + static_cast<long>(take), rows.end());
  }
  return {select_rows(dataset, std::move(first), "train"),
          select_rows(dataset, std::move(second), "test")};
}

TabularDataset stratified_subsample(const TabularDataset& dataset, std::size_t count,
                                    std::uint64_t seed) {
  dataset.validate();
  if (count >= dataset.size()) return dataset;
  Rng rng = make_rng(seed, 0x50b5);
  const double fraction = static_cast<double>(count) / static_cast<double>(dataset.size());
  std::vector<std::size_t> chosen;
  for (auto& [label, rows] : by_class(dataset)) {
    shuffle(rows.begin(), rows.end(), rng);
    auto take = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(rows.size())));
    take = std::clamp<std::size_t>(take, 1, rows.size());
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + static_cast<long>(take));
  }
  return select_rows(dataset, std::move(chosen), dataset.split + "-subsample");
}

void write_dataset(const TabularDataset& dataset, std::ostream& out, Delimiter delimiter) {
  const char sep = delimiter == Delimiter::kComma ? ',' : ' ';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.features[i]) out << format_double(v) << sep;
    out << dataset.class_names[dataset.labels[i]] << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line) || line.front() == '#') continue;
    std::istringstream fields(line);
    ManifestEntry entry;
    fields >> entry.file;
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kParseError, "expected key=value", number);
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "rows") {
        entry.rows = parse_size(value);
      } else if (key == "columns") {
        entry.columns = parse_size(value);
      } else if (key == "sha256") {
        entry.sha256 = value;
      }
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buffer[1 << 15];
  while (in) {
    in.read(buffer, sizeof buffer);
    EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

void verify_manifest_entry(const std::filesystem::path& dir, const ManifestEntry& entry,
                           Delimiter delimiter) {
  const auto path = dir / entry.file;
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingDataset, path.string() + " not found");
  }
  std::ifstream in(path);
  std::string line;
  std::size_t rows = 0;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line)) continue;
    ++rows;
    const auto width = split_line(line, delimiter).size();
    if (entry.columns != 0 && width != entry.columns) {
      throw Error(ErrorCode::kParseError, entry.file + ": unexpected column count", number);
    }
  }
  if (entry.rows != 0 && rows != entry.rows) {
    throw Error(ErrorCode::kParseError,
                entry.file + ": expected " + std::to_string(entry.rows) + " rows, found " +
                    std::to_string(rows),
                number);
  }
  if (!entry.sha256.empty() && sha256_file(path) != entry.sha256) {
    throw Error(ErrorCode::kParseError, entry.file + ": checksum mismatch", number);
  }
}

std::string to_string(DatasetId id) {
  switch (id) {
    case DatasetId::kXor: return "xor";
    case DatasetId::kIris: return "iris";
    case DatasetId::kWbc: return "wbc";
    case DatasetId::kLandsat: return "landsat";
  }
  return "xor";
}

DatasetId parse_dataset_id(const std::string& text) {
  if (text == "xor") return DatasetId::kXor;
  if (text == "iris") return DatasetId::kIris;
  if (text == "wbc") return DatasetId::kWbc;
  if (text == "landsat") return DatasetId::kLandsat;
  throw Error(ErrorCode::kConfigError, "unknown dataset '" + text + "'");
}

std::pair<TabularDataset, TabularDataset> load_benchmark(
    DatasetId id, const std::filesystem::path& data_dir) {
  const auto need = [&](const char* file) {
    const auto path = data_dir / file;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kMissingDataset, path.string() + " not found");
    }
    return path;
  };
  switch (id) {
    case DatasetId::kXor:
      return {load_xor(), TabularDataset{}};
    case DatasetId::kIris: {
      auto ds = load_csv(need(kIrisFile), iris_schema());
      ds.name = "iris";
      return {std::move(ds), TabularDataset{}};
    }
    case DatasetId::kWbc: {
      auto ds = load_csv(need(kWbcFile), wbc_schema());
      ds.name = "wbc";
      return {std::move(ds), TabularDataset{}};
    }
    case DatasetId::kLandsat: {
      auto train = load_csv(need(kLandsatTrainFile), landsat_schema());
      auto test = load_csv(need(kLandsatTestFile), landsat_schema());
      train.name = test.name = "landsat";
      train.split = "train";
      test.split = "test";
      return {std::move(train), std::move(test)};
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown dataset");
}

}  // namespace spikerobust
