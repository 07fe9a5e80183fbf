#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spikerobust {

struct FeatureStats {
  std::vector<double> min;
  std::vector<double> max;

  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

struct TabularDataset {
  std::string name;
  std::string split;  // "all", "train", "test", ...
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  // Rows removed during cleaning because of missing values.
  std::size_t dropped_rows = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t num_features() const { return features.empty() ? 0 : features.front().size(); }
  std::size_t num_classes() const { return class_names.size(); }

  // Throws kEmptyDataset / kMalformedInput on broken invariants.
  void validate() const;

  friend bool operator==(const TabularDataset&, const TabularDataset&) = default;
};

// Per-column min/max. A constant column is widened to [v - 0.5, v + 0.5] so
// that min < max always holds.
FeatureStats compute_stats(const TabularDataset& dataset);

enum class Delimiter { kComma, kWhitespace };

struct CsvSchema {
  Delimiter delimiter = Delimiter::kComma;
  // Column holding the class label; negative values count from the end.
  int label_column = -1;
  // Columns skipped entirely (e.g. sample ids).
  std::vector<int> ignore_columns;
  std::string missing_token = "?";
  // If non-empty, label strings are mapped to indices in this order and any
  // other label is a parse error. Otherwise first-appearance order is used.
  std::vector<std::string> class_order;
  // Replace the 36 band values of a Landsat case by its 4 per-band means.
  bool landsat_average = false;
};

CsvSchema iris_schema();
CsvSchema wbc_schema();
CsvSchema landsat_schema();

// Two bit features, label 0 for equal bits and 1 otherwise.
TabularDataset load_xor();

// Parses a delimited text file. Rows containing the missing token are
// dropped and counted. Errors: kIoError, kParseError (with line), kEmptyDataset.
TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Means of the 9 pixels for each of the 4 bands; input is pixel-major
// (p1b1, p1b2, p1b3, p1b4, p2b1, ...). Throws kMalformedCase unless 36 values.
std::array<double, 4> landsat_average_pixel(std::span<const double> values);

// Stratified random split; `ratio` of every class goes to the first part
// (rounded to nearest). Throws kClassTooSmall if a class has < 2 samples.
std::pair<TabularDataset, TabularDataset> split(const TabularDataset& dataset,
                                                double ratio, std::uint64_t seed);

// Stratified subset of `count` samples (proportional per class, at least one
// per class).
TabularDataset stratified_subsample(const TabularDataset& dataset, std::size_t count,
                                    std::uint64_t seed);

// Writes features followed by the class name, one row per sample.
void write_dataset(const TabularDataset& dataset, std::ostream& out,
                   Delimiter delimiter = Delimiter::kComma);

// MANIFEST lines: "<file> rows=<n> columns=<n> sha256=<hex>".
struct ManifestEntry {
  std::string file;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::string sha256;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
std::string sha256_file(const std::filesystem::path& path);
// Throws kMissingDataset if the file is absent, kParseError if the row or
// column count or the checksum differs.
void verify_manifest_entry(const std::filesystem::path& dir, const ManifestEntry& entry,
                           Delimiter delimiter);

enum class DatasetId { kXor, kIris, kWbc, kLandsat };

std::string to_string(DatasetId id);
DatasetId parse_dataset_id(const std::string& text);

// Expected file names inside a data directory.
inline constexpr const char* kIrisFile = "iris.data";
inline constexpr const char* kWbcFile = "breast-cancer-wisconsin.data";
inline constexpr const char* kLandsatTrainFile = "sat.trn";
inline constexpr const char* kLandsatTestFile = "sat.tst";

// Loads a benchmark from `data_dir`, throwing kMissingDataset if a file is
// absent. Landsat returns its shipped train/test pair; the others return
// the whole set in `first` and an empty `second`.
std::pair<TabularDataset, TabularDataset> load_benchmark(DatasetId id,
                                                         const std::filesystem::path& data_dir);

}  // namespace spikerobust
