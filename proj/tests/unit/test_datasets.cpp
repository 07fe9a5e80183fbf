#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "spikerobust/datasets.hpp"
#include "spikerobust/error.hpp"
#include "spikerobust/random.hpp"

using namespace spikerobust;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SPIKEROBUST_DATA_DIR;

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / ("spikerobust_" + name);
  std::ofstream(path) << text;
  return path;
}

std::map<std::size_t, std::size_t> class_counts(const TabularDataset& ds) {
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t label : ds.labels) ++counts[label];
  return counts;
}

std::vector<std::pair<std::vector<double>, std::size_t>> rows_of(const TabularDataset& ds) {
  std::vector<std::pair<std::vector<double>, std::size_t>> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) rows.emplace_back(ds.features[i], ds.labels[i]);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

TEST_CASE("XOR dataset") {
  const TabularDataset ds = load_xor();
  REQUIRE(ds.size() == 4);
  CHECK(ds.num_features() == 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const bool same = ds.features[i][0] == ds.features[i][1];
    CHECK(ds.labels[i] == (same ? 0u : 1u));
  }
}

TEST_CASE("Iris loads with 150 samples in 3 balanced classes") {
  const TabularDataset ds = load_csv(kData / kIrisFile, iris_schema());
  CHECK(ds.size() == 150);
  CHECK(ds.num_features() == 4);
  CHECK(ds.num_classes() == 3);
  for (auto [label, n] : class_counts(ds)) CHECK(n == 50);
  CHECK(ds.dropped_rows == 0);
}

TEST_CASE("WBC drops incomplete rows") {
  const TabularDataset ds = load_csv(kData / kWbcFile, wbc_schema());
  CHECK(ds.size() <= 699);
  CHECK(ds.size() + ds.dropped_rows == 699);
  CHECK(ds.dropped_rows == 16);
  CHECK(ds.num_features() == 9);
  CHECK(ds.num_classes() == 2);
}

TEST_CASE("Landsat loads averaged bands and the shipped split") {
  const auto [train, test] = load_benchmark(DatasetId::kLandsat, kData);
  CHECK(train.size() == 4435);
  CHECK(test.size() == 2000);
  CHECK(train.num_features() == 4);
  CHECK(train.num_classes() == 6);
  CHECK(test.num_classes() == 6);
  for (std::size_t label : train.labels) CHECK(label < 6);
}

TEST_CASE("landsat pixel averaging") {
  std::vector<double> same(36, 3.5);
  CHECK(landsat_average_pixel(same) == std::array<double, 4>{3.5, 3.5, 3.5, 3.5});
  std::vector<double> band1(36, 0.0);
  for (int p = 0; p < 9; ++p) band1[4 * p] = p + 1.0;
  CHECK(landsat_average_pixel(band1) == std::array<double, 4>{5.0, 0.0, 0.0, 0.0});
  std::vector<double> short_case(35, 1.0);
  try {
    landsat_average_pixel(short_case);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedCase);
  }
}

TEST_CASE("landsat averaging matches a naive per-band mean and ignores pixel order") {
  Rng rng = make_rng(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(36);
    for (double& v : values) v = static_cast<double>(uniform_index(rng, 256));
    std::array<double, 4> expected{};
    for (int b = 0; b < 4; ++b) {
      double sum = 0.0;
      for (int p = 0; p < 9; ++p) sum += values[4 * p + b];
      expected[b] = sum / 9.0;
    }
    const auto got = landsat_average_pixel(values);
    for (int b = 0; b < 4; ++b) CHECK(got[b] == doctest::Approx(expected[b]).epsilon(1e-14));

    std::vector<int> pixels = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    shuffle(pixels.begin(), pixels.end(), rng);
    std::vector<double> permuted(36);
    for (int p = 0; p < 9; ++p) {
      for (int b = 0; b < 4; ++b) permuted[4 * p + b] = values[4 * pixels[p] + b];
    }
    const auto again = landsat_average_pixel(permuted);
    for (int b = 0; b < 4; ++b) CHECK(again[b] == doctest::Approx(got[b]).epsilon(1e-14));
  }
}

TEST_CASE("parse errors carry the line number") {
  const fs::path path = write_temp("bad.csv", "1,2,a\n3,4,b\n5,x,a\n");
  try {
    load_csv(path, iris_schema());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(e.line() == 3);
  }
  const fs::path ragged = write_temp("ragged.csv", "1,2,a\n3,b\n");
  try {
    load_csv(ragged, iris_schema());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("loader error codes") {
  const auto code_of = [](const fs::path& path, const CsvSchema& schema) {
    try {
      load_csv(path, schema);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfigError;
  };
  CHECK(code_of("/nonexistent/file.csv", iris_schema()) == ErrorCode::kIoError);
  CHECK(code_of(write_temp("empty.csv", "\n\n"), iris_schema()) == ErrorCode::kEmptyDataset);
  CHECK(code_of(write_temp("missing.csv", "1,?,a\n"), iris_schema()) == ErrorCode::kEmptyDataset);
  CHECK(code_of(write_temp("label.csv", "1,1,2,3,4,5,6,7,8,9,3\n"), wbc_schema()) ==
        ErrorCode::kParseError);
  try {
    load_benchmark(DatasetId::kIris, "/nonexistent");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingDataset);
  }
}

TEST_CASE("labels follow first appearance") {
  const TabularDataset ds = load_csv(write_temp("order.csv", "1,b\n2,a\n3,b\n4,c\n"), iris_schema());
  CHECK(ds.class_names == std::vector<std::string>{"b", "a", "c"});
  CHECK(ds.labels == std::vector<std::size_t>{0, 1, 0, 2});
}

TEST_CASE("loading twice gives identical datasets") {
  CHECK(load_csv(kData / kIrisFile, iris_schema()) == load_csv(kData / kIrisFile, iris_schema()));
  CHECK(load_csv(kData / kWbcFile, wbc_schema()) == load_csv(kData / kWbcFile, wbc_schema()));
}

TEST_CASE("stratified split of Iris") {
  const TabularDataset ds = load_csv(kData / kIrisFile, iris_schema());
  const auto [train, test] = split(ds, 0.5, 7);
  CHECK(train.size() + test.size() == 150);
  CHECK(std::abs(static_cast<int>(train.size()) - 75) <= 3);
  for (auto [label, n] : class_counts(train)) CHECK(std::abs(static_cast<int>(n) - 25) <= 1);
  for (auto [label, n] : class_counts(test)) CHECK(std::abs(static_cast<int>(n) - 25) <= 1);

  const auto [train2, test2] = split(ds, 0.5, 7);
  CHECK(train == train2);
  CHECK(test == test2);
  CHECK(split(ds, 0.5, 8).first != train);

  TabularDataset both = train;
  for (std::size_t i = 0; i < test.size(); ++i) {
    both.features.push_back(test.features[i]);
    both.labels.push_back(test.labels[i]);
  }
  CHECK(rows_of(both) == rows_of(ds));
}

TEST_CASE("split rejects tiny classes and bad ratios") {
  TabularDataset ds = load_xor();
  ds.features.push_back({0.5, 0.5});
  ds.labels.push_back(2);
  ds.class_names.push_back("odd");
  try {
    split(ds, 0.5, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kClassTooSmall);
  }
  CHECK_THROWS_AS(split(load_xor(), 1.0, 1), Error);
}

TEST_CASE("training statistics do not depend on test data") {
  const TabularDataset ds = load_csv(kData / kIrisFile, iris_schema());
  const auto [train, test] = split(ds, 0.5, 3);
  const FeatureStats stats = compute_stats(train);
  for (std::size_t c = 0; c < 4; ++c) {
    double lo = train.features[0][c], hi = lo;
    for (const auto& row : train.features) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    CHECK(stats.min[c] == lo);
    CHECK(stats.max[c] == hi);
    CHECK(stats.min[c] < stats.max[c]);
  }
  TabularDataset constant = load_xor();
  for (auto& row : constant.features) row[0] = 2.0;
  const FeatureStats widened = compute_stats(constant);
  CHECK(widened.min[0] == 1.5);
  CHECK(widened.max[0] == 2.5);
}

TEST_CASE("stratified subsample keeps every class") {
  const auto [train, test] = load_benchmark(DatasetId::kLandsat, kData);
  const TabularDataset sub = stratified_subsample(train, 500, 1);
  CHECK(std::abs(static_cast<int>(sub.size()) - 500) <= 6);
  CHECK(class_counts(sub).size() == 6);
  CHECK(sub == stratified_subsample(train, 500, 1));
}

TEST_CASE("cleaned dump parses back to the same data") {
  const TabularDataset ds = load_csv(kData / kWbcFile, wbc_schema());
  std::ostringstream out;
  write_dataset(ds, out);
  const fs::path path = write_temp("wbc_dump.csv", out.str());
  CsvSchema schema;
  schema.class_order = ds.class_names;
  const TabularDataset back = load_csv(path, schema);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
}

TEST_CASE("shipped data matches the manifest") {
  const auto entries = read_manifest(kData / "MANIFEST.txt");
  REQUIRE(entries.size() == 4);
  for (const ManifestEntry& entry : entries) {
    const Delimiter delim = entry.file.rfind("sat.", 0) == 0 ? Delimiter::kWhitespace
                                                            : Delimiter::kComma;
    CHECK_NOTHROW(verify_manifest_entry(kData, entry, delim));
  }
  ManifestEntry wrong = entries.front();
  wrong.sha256 = std::string(64, '0');
  CHECK_THROWS_AS(verify_manifest_entry(kData, wrong, Delimiter::kComma), Error);
  ManifestEntry absent = entries.front();
  absent.file = "no-such-file.data";
  try {
    verify_manifest_entry(kData, absent, Delimiter::kComma);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingDataset);
  }
}

TEST_CASE("dataset ids") {
  for (DatasetId id : {DatasetId::kXor, DatasetId::kIris, DatasetId::kWbc, DatasetId::kLandsat}) {
    CHECK(parse_dataset_id(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_dataset_id("mnist"), Error);
}
