// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "sala/data/dataset.hpp"
#include "sala/data/dataset_io.hpp"
#include "sala/data/episode.hpp"
#include "sala/data/synthetic.hpp"
#include "sala/util/binary_io.hpp"

using namespace sala;
using namespace sala::data;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("sala_data_test_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Dataset two_by_three() {
  std::vector<ClassData> classes(2);
  classes[0] = {"alpha", Partition::train, {1, 2, 3, 4, 5, 6}, {1, 0, 1}};
  classes[1] = {"beta", Partition::test, {-1, -2, -3, -4, -5, -6}, {0, 1, 1}};
  return Dataset({2}, std::move(classes));
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

SyntheticSpec small_spec(std::uint64_t seed = 1) {
  SyntheticSpec s;
  s.n_classes = 30;
  s.dim = 8;
  s.samples_per_class = 60;
  s.seed = seed;
  s.train_fraction = 0.5;
  s.validation_fraction = 0.2;
  return s;
}

}  // namespace

TEST(Dataset, EmptyClassListIsRejected) {
  EXPECT_EQ(error_of([] { Dataset({2}, {}); }), "no classes");
}

TEST(Dataset, ValidatesClassContents) {
  EXPECT_THROW(Dataset({2}, {{"a b", Partition::train, {1, 2}, {1}}}), std::invalid_argument);
  EXPECT_THROW(Dataset({2}, {{"a", Partition::train, {1, 2, 3}, {1}}}), std::invalid_argument);
  EXPECT_THROW(Dataset({2}, {{"a", Partition::train, {1, NAN}, {1}}}), std::invalid_argument);
  EXPECT_THROW(Dataset({2}, {{"a", Partition::train, {1, 2}, {1}}, {"a", Partition::test, {1, 2}, {1}}}),
               std::invalid_argument);
}

TEST(Dataset, IndexesSplitAndPartitions) {
  Dataset ds = two_by_three();
  EXPECT_EQ(ds.labeled_indices(0), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ds.unlabeled_indices(0), (std::vector<std::size_t>{1}));
  EXPECT_EQ(ds.classes_in(Partition::test), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(ds.classes_in(Partition::validation).empty());
  auto s = ds.sample(1, 2);
  EXPECT_EQ(std::vector<double>(s.begin(), s.end()), (std::vector<double>{-5, -6}));
  EXPECT_THROW(ds.sample(1, 3), std::out_of_range);
}

TEST(DatasetIo, TensorFileLayoutIsLittleEndian) {
  Dataset ds({1}, {{"c", Partition::train, {1.0}, {1}}});
  auto bytes = encode_tensor_file(ds);
  // magic | u32 classes | u32 samples | u8 rank | u32 extent | f64
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 1 + 4 + 8);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SDT1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 1);
  EXPECT_EQ(bytes[13], 1);
  EXPECT_EQ(bytes[23], 0xf0);
  EXPECT_EQ(bytes[24], 0x3f);  // high byte of 1.0
}

TEST(DatasetIo, SplitBitmapIsLsbFirst) {
  Dataset ds({1}, {{"c", Partition::train, std::vector<double>(10, 0.0), {1, 0, 0, 1, 0, 0, 0, 0, 0, 1}}});
  auto bytes = encode_split_file(ds);
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 2);
  EXPECT_EQ(bytes[12], 0b00001001);
  EXPECT_EQ(bytes[13], 0b00000010);
}

TEST(DatasetIo, TextFilesListClassesInOrder) {
  Dataset ds = two_by_three();
  EXPECT_EQ(encode_label_file(ds), "alpha\nbeta\n");
  EXPECT_EQ(encode_partition_file(ds), "alpha train\nbeta test\n");
}

TEST(DatasetIo, SaveLoadRoundTripIsExact) {
  TempDir dir("roundtrip");
  Dataset ds = two_by_three();
  save_dataset(dir.path(), ds);
  for (const char* f : {kTensorFile, kLabelFile, kSplitFile, kPartitionFile}) EXPECT_TRUE(fs::exists(dir.path() / f));
  Dataset back = load_dataset(dir.path());
  ASSERT_EQ(back.class_count(), 2u);
  EXPECT_EQ(back.sample_shape(), ds.sample_shape());
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_EQ(back.cls(c).name, ds.cls(c).name);
    EXPECT_EQ(back.cls(c).partition, ds.cls(c).partition);
    EXPECT_EQ(back.cls(c).values, ds.cls(c).values);
    EXPECT_EQ(back.cls(c).labeled, ds.cls(c).labeled);
  }
}

TEST(DatasetIo, CorruptMagicNamesFileAndOffset) {
  TempDir dir("magic");
  save_dataset(dir.path(), two_by_three());
  auto bytes = io::read_file(dir.path() / kTensorFile);
  bytes[0] = 'X';
  io::write_file(dir.path() / kTensorFile, bytes);
  auto msg = error_of([&] { load_dataset(dir.path()); });
  EXPECT_NE(msg.find("data.sdt"), std::string::npos) << msg;
  EXPECT_NE(msg.find("offset"), std::string::npos) << msg;
}

TEST(DatasetIo, TruncatedTensorFileIsRejected) {
  TempDir dir("truncated");
  save_dataset(dir.path(), two_by_three());
  auto bytes = io::read_file(dir.path() / kTensorFile);
  bytes.resize(bytes.size() - 3);
  io::write_file(dir.path() / kTensorFile, bytes);
  EXPECT_THROW(load_dataset(dir.path()), io::FormatError);
}

TEST(DatasetIo, SplitCountMismatchIsRejected) {
  TempDir dir("splitcount");
  Dataset ds = two_by_three();
  save_dataset(dir.path(), ds);
  Dataset other({2}, {{"alpha", Partition::train, {1, 2, 3, 4}, {1, 0}},
                      {"beta", Partition::test, {1, 2, 3, 4, 5, 6}, {1, 1, 1}}});
  io::write_file(dir.path() / kSplitFile, encode_split_file(other));
  auto msg = error_of([&] { load_dataset(dir.path()); });
  EXPECT_NE(msg.find("split.sds"), std::string::npos) << msg;
}

TEST(DatasetIo, PartitionFileErrorsNameTheLine) {
  TempDir dir("partition");
  save_dataset(dir.path(), two_by_three());
  const fs::path p = dir.path() / kPartitionFile;

  write_text(p, "alpha train\nbeta test\ngamma test\n");
  auto msg = error_of([&] { load_dataset(dir.path()); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;

  write_text(p, "alpha train\nalpha test\nbeta test\n");
  msg = error_of([&] { load_dataset(dir.path()); });
  EXPECT_NE(msg.find("overlapping partitions"), std::string::npos) << msg;

  write_text(p, "alpha train\n");
  msg = error_of([&] { load_dataset(dir.path()); });
  EXPECT_NE(msg.find("beta"), std::string::npos) << msg;

  write_text(p, "alpha train\nbeta holdout\n");
  EXPECT_THROW(load_dataset(dir.path()), std::runtime_error);
}

TEST(DatasetIo, LabelFileMustMatchClassCount) {
  TempDir dir("labels");
  save_dataset(dir.path(), two_by_three());
  write_text(dir.path() / kLabelFile, "alpha\n");
  EXPECT_THROW(load_dataset(dir.path()), std::runtime_error);
  write_text(dir.path() / kLabelFile, "alpha\nalpha\n");
  EXPECT_THROW(load_dataset(dir.path()), std::runtime_error);
}

TEST(DatasetIo, MissingDirectoryIsAnError) {
  EXPECT_THROW(load_dataset(fs::temp_directory_path() / "sala_no_such_dataset"), std::runtime_error);
}

TEST(Split, LabeledCountIsRoundedFraction) {
  std::vector<ClassData> classes{{"a", Partition::train, std::vector<double>(20, 0.0), std::vector<std::uint8_t>(20, 1)},
                                 {"b", Partition::train, std::vector<double>(600, 0.0),
                                  std::vector<std::uint8_t>(600, 1)}};
  Dataset ds({1}, std::move(classes));
  Dataset s1 = make_split(ds, 0.1, 9);
  EXPECT_EQ(s1.labeled_indices(0).size(), 2u);
  EXPECT_EQ(s1.labeled_indices(1).size(), 60u);
  Dataset s4 = make_split(ds, 0.4, 9);
  EXPECT_EQ(s4.labeled_indices(1).size(), 240u);
  EXPECT_EQ(s4.unlabeled_indices(1).size(), 360u);
}

TEST(Split, SeedControlsTheDraw) {
  Dataset ds = gen_synthetic(small_spec());
  Dataset a = make_split(ds, 0.3, 5);
  Dataset b = make_split(ds, 0.3, 5);
  Dataset c = make_split(ds, 0.3, 6);
  EXPECT_EQ(a.labeled_indices(3), b.labeled_indices(3));
  EXPECT_NE(a.labeled_indices(3), c.labeled_indices(3));
}

TEST(Split, TooSmallFractionIsAnError) {
  Dataset ds({1}, {{"a", Partition::train, std::vector<double>(3, 0.0), std::vector<std::uint8_t>(3, 1)}});
  EXPECT_THROW(make_split(ds, 0.1, 0), std::invalid_argument);
  EXPECT_THROW(make_split(ds, 1.0, 0), std::invalid_argument);
}

TEST(Episode, StandardSizesWithoutDistractors) {
  Dataset ds = gen_synthetic(small_spec());
  EpisodeSpec spec{.ways = 5, .shots = 1, .queries = 15, .unlabeled_per_class = 15, .distractors = 0, .seed = 3};
  Episode ep = sample_episode(ds, spec, Partition::train);
  EXPECT_EQ(ep.task.support.count, 5u);
  EXPECT_EQ(ep.task.query.count, 75u);
  EXPECT_EQ(ep.task.unlabeled.count, 75u);
  EXPECT_EQ(ep.task.support.values.size(), 5u * 8);
  EXPECT_EQ(spec.unlabeled_total(), 75u);
  for (int t : ep.truth.episode_class) EXPECT_NE(t, UnlabeledTruth::kDistractor);
}

TEST(Episode, DistractorsAddUnlabeledFromOtherClasses) {
  Dataset ds = gen_synthetic(small_spec());
  EpisodeSpec spec{.ways = 5, .shots = 1, .queries = 15, .unlabeled_per_class = 15, .distractors = 5, .seed = 4};
  Episode ep = sample_episode(ds, spec, Partition::train);
  EXPECT_EQ(ep.task.unlabeled.count, 150u);
  std::size_t distractors = 0;
  for (std::size_t u = 0; u < ep.unlabeled_refs.size(); ++u) {
    const bool is_d = ep.truth.episode_class[u] == UnlabeledTruth::kDistractor;
    distractors += is_d ? 1 : 0;
    const auto& owners = is_d ? ep.distractor_classes : ep.classes;
    EXPECT_NE(std::find(owners.begin(), owners.end(), ep.unlabeled_refs[u].cls), owners.end());
    if (!is_d) {
      EXPECT_EQ(ep.classes[static_cast<std::size_t>(ep.truth.episode_class[u])], ep.unlabeled_refs[u].cls);
    }
  }
  EXPECT_EQ(distractors, 75u);
}

TEST(Episode, SetsAreDisjointAndRespectSplitAndPartition) {
  Dataset ds = gen_synthetic(small_spec());
  const auto train = ds.classes_in(Partition::train);
  const std::set<std::size_t> train_set(train.begin(), train.end());
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    EpisodeSpec spec{.ways = 5, .shots = 2, .queries = 3, .unlabeled_per_class = 4, .distractors = 3, .seed = seed};
    Episode ep = sample_episode(ds, spec, Partition::train);
    std::set<SampleRef> seen;
    for (const auto* refs : {&ep.support_refs, &ep.query_refs, &ep.unlabeled_refs}) {
      for (const SampleRef& r : *refs) {
        ASSERT_TRUE(seen.insert(r).second) << "seed " << seed;
        ASSERT_TRUE(train_set.count(r.cls));
      }
    }
    for (const SampleRef& r : ep.support_refs) ASSERT_TRUE(ds.cls(r.cls).labeled[r.index]);
    for (const SampleRef& r : ep.query_refs) ASSERT_TRUE(ds.cls(r.cls).labeled[r.index]);
    for (const SampleRef& r : ep.unlabeled_refs) ASSERT_FALSE(ds.cls(r.cls).labeled[r.index]);
    std::set<std::size_t> all(ep.classes.begin(), ep.classes.end());
    for (std::size_t c : ep.distractor_classes) ASSERT_TRUE(all.insert(c).second);
  }
}

TEST(Episode, SameSeedSameEpisode) {
  Dataset ds = gen_synthetic(small_spec());
  EpisodeSpec spec{.seed = 77};
  Episode a = sample_episode(ds, spec, Partition::test);
  Episode b = sample_episode(ds, spec, Partition::test);
  EXPECT_EQ(a.support_refs, b.support_refs);
  EXPECT_EQ(a.unlabeled_refs, b.unlabeled_refs);
  EXPECT_EQ(a.task.query.values, b.task.query.values);
}

TEST(Episode, InsufficientDataIsReported) {
  Dataset ds = gen_synthetic(small_spec());
  EpisodeSpec too_many_ways{.ways = 7, .seed = 0};
  auto msg = error_of([&] { sample_episode(ds, too_many_ways, Partition::validation); });
  EXPECT_NE(msg.find("6 classes"), std::string::npos) << msg;

  EpisodeSpec too_many_queries{.ways = 5, .shots = 5, .queries = 20, .seed = 0};
  msg = error_of([&] { sample_episode(ds, too_many_queries, Partition::train); });
  EXPECT_NE(msg.find("24 labeled"), std::string::npos) << msg;

  EpisodeSpec zero{.ways = 0};
  EXPECT_THROW(sample_episode(ds, zero, Partition::train), std::invalid_argument);
}

TEST(Synthetic, PartitionsFollowFractions) {
  Dataset ds = gen_synthetic(SyntheticSpec{.samples_per_class = 10});
  EXPECT_EQ(ds.classes_in(Partition::train).size(), 64u);
  EXPECT_EQ(ds.classes_in(Partition::validation).size(), 16u);
  EXPECT_EQ(ds.classes_in(Partition::test).size(), 20u);
  EXPECT_EQ(ds.labeled_indices(0).size(), 4u);
}

TEST(Synthetic, MeansKeepMinimumSeparation) {
  SyntheticSpec spec = small_spec();
  spec.separation = 5.0;
  auto means = synthetic_means(spec);
  for (std::size_t a = 0; a < spec.n_classes; ++a) {
    for (std::size_t b = a + 1; b < spec.n_classes; ++b) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < spec.dim; ++k) d2 += std::pow(means[a * spec.dim + k] - means[b * spec.dim + k], 2);
      EXPECT_GE(std::sqrt(d2), 5.0);
    }
  }
}

TEST(Synthetic, ZeroSpreadGivesIdenticalSamples) {
  SyntheticSpec spec = small_spec();
  spec.cluster_std = 0.0;
  Dataset ds = gen_synthetic(spec);
  auto means = synthetic_means(spec);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      auto x = ds.sample(c, s);
      for (std::size_t k = 0; k < spec.dim; ++k) ASSERT_EQ(x[k], means[c * spec.dim + k]);
    }
  }
}

TEST(Synthetic, NearestMeanIsPerfectWhenWellSeparated) {
  SyntheticSpec spec = small_spec();
  spec.separation = 10.0;
  spec.cluster_std = 0.1;
  Dataset ds = gen_synthetic(spec);
  auto means = synthetic_means(spec);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      auto x = ds.sample(c, s);
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t m = 0; m < spec.n_classes; ++m) {
        double d = 0.0;
        for (std::size_t k = 0; k < spec.dim; ++k) d += std::pow(x[k] - means[m * spec.dim + k], 2);
        if (d < best_d) best_d = d, best = m;
      }
      ASSERT_EQ(best, c);
    }
  }
}

TEST(Synthetic, GenerationIsDeterministic) {
  Dataset a = gen_synthetic(small_spec(4));
  Dataset b = gen_synthetic(small_spec(4));
  Dataset c = gen_synthetic(small_spec(5));
  EXPECT_EQ(a.cls(7).values, b.cls(7).values);
  EXPECT_EQ(a.cls(7).labeled, b.cls(7).labeled);
  EXPECT_NE(a.cls(7).values, c.cls(7).values);
}

TEST(Synthetic, InvalidSpecsAreRejected) {
  EXPECT_THROW(gen_synthetic(SyntheticSpec{.n_classes = 0}), std::invalid_argument);
  EXPECT_THROW(gen_synthetic(SyntheticSpec{.separation = 0}), std::invalid_argument);
  EXPECT_THROW(gen_synthetic(SyntheticSpec{.train_fraction = 0.9, .validation_fraction = 0.2}), std::invalid_argument);
}
