#include "fixtures.hpp"

#include <atomic>

namespace fixture {

using namespace chronicle;

SynthParams small_params(std::size_t lots, std::size_t releases) {
  SynthParams p;
  p.lots = lots;
  p.releases = releases;
  p.boroughs = 3;
  p.neighborhoods_per_side = 3;
  p.districts_per_side = 2;
  p.lots_per_block = 6;
  return p;
}

Corpus make_corpus(const SynthParams& params, std::uint64_t seed, const DedupOptions& dedup) {
  Corpus c;
  c.synth = generate_synthetic(params, seed);
  c.sequence = consolidate(c.synth.releases);
  PreprocessOptions options;
  options.dedup = dedup;
  options.seed = seed;
  options.neighborhoods = c.synth.neighborhoods;
  options.districts = c.synth.districts;
  options.boroughs = c.synth.boroughs;
  c.store = std::make_shared<const Store>(preprocess(c.sequence, default_schema(), options));
  return c;
}

const Corpus& shared_corpus() {
  static const Corpus corpus = make_corpus(small_params(), 7);
  return corpus;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("chronicle-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Polygon ring_polygon(Ring ring) {
  Polygon p;
  p.parts.push_back({std::move(ring), {}});
  normalize(p);
  return p;
}

Polygon rect(double x0, double y0, double x1, double y1) {
  return ring_polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Polygon square(double x0, double y0, double side) { return rect(x0, y0, x0 + side, y0 + side); }

}  // namespace fixture
