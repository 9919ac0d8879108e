#pragma once

#include <filesystem>
#include <memory>
#include <random>

#include "chronicle/engine.hpp"
#include "chronicle/ingest.hpp"
#include "chronicle/store.hpp"
#include "chronicle/synth.hpp"

namespace fixture {

/// A few hundred lots over a handful of releases.
chronicle::SynthParams small_params(std::size_t lots = 300, std::size_t releases = 6);

struct Corpus {
  chronicle::SynthCorpus synth;
  chronicle::ReleaseSequence sequence;
  std::shared_ptr<const chronicle::Store> store;
};

/// Generated, consolidated and preprocessed in memory.
Corpus make_corpus(const chronicle::SynthParams& params, std::uint64_t seed,
                   const chronicle::DedupOptions& dedup = {});

/// Cached default corpus shared by tests in one binary.
const Corpus& shared_corpus();

/// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

chronicle::Polygon square(double x0, double y0, double side);
chronicle::Polygon rect(double x0, double y0, double x1, double y1);
chronicle::Polygon ring_polygon(chronicle::Ring ring);

}  // namespace fixture
