#include "pdd/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "pdd/log_domain.hpp"
#include "pdd/speckle.hpp"

namespace pdd {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Seed domain tag for per-group streams; keeps them disjoint from the
// per-row streams of the speckle simulator under the same run seed.
constexpr std::uint64_t kGroupSeedTag = 0x706464e67727075ULL;

} // namespace

DespeckleResult despeckle_image(const Raster& noisy, const DenoiseConfig& config,
                                const DespeckleOptions& options) {
  config.validate();
  if (noisy.domain() != Domain::Intensity)
    throw ValidationError("despeckle: expected an intensity raster");
  if (options.workers < 1 || options.workers > 256)
    throw ValidationError("despeckle: workers must be in [1, 256]");

  const auto t0 = Clock::now();
  DespeckleResult result{Raster::constant(1, 1, 0.0, Domain::Intensity), {}, {}, 0};

  // Log transform, then remove the mean of the log-speckle so the additive
  // noise is zero-mean around the log reflectivity. The exponential at the
  // end undoes only the transform: the shift stays removed.
  const double floor_value = default_floor(noisy, config.floor_scale);
  const double bias = log_speckle_bias(Looks(config.looks));
  const Raster log_image =
      add_scalar(log_transform(noisy, floor_value), -bias);
  const SearchContext context(log_image);

  const std::vector<PatchOrigin> origins =
      reference_origins(noisy.height(), noisy.width(), config.geometry());
  const Index total = static_cast<Index>(origins.size());
  result.groups = total;
  result.timings.transform_ms = ms_since(t0);

  const auto t1 = Clock::now();
  const int workers =
      static_cast<int>(std::min<Index>(options.workers, total > 0 ? total : 1));

  std::vector<Accumulator> partial;
  partial.reserve(workers);
  for (int w = 0; w < workers; ++w)
    partial.emplace_back(noisy.height(), noisy.width());
  std::vector<std::vector<GroupDiagnostics>> diagnostics(workers);

  const Index chunk = (total + workers - 1) / workers;
  std::atomic<Index> done{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run_block = [&](int w) {
    try {
      const Index begin = static_cast<Index>(w) * chunk;
      const Index end = std::min(total, begin + chunk);
      for (Index g = begin; g < end; ++g) {
        const PatchGroup group =
            find_similar(context, origins[static_cast<std::size_t>(g)],
                         config.geometry(), Looks(config.looks));
        // Seed depends only on the run seed and the group's position in the
        // reference grid, never on scheduling.
        const std::uint64_t group_seed =
            rng::mix(rng::mix(config.seed, kGroupSeedTag),
                     static_cast<std::uint64_t>(g));
        GroupEstimate estimate = denoise_group(group, config, group_seed);
        partial[static_cast<std::size_t>(w)].add(estimate.estimates, group.origins,
                                                 estimate.weights,
                                                 config.patch_side);
        if (options.collect_diagnostics)
          diagnostics[static_cast<std::size_t>(w)].push_back(estimate.diagnostics);
        const Index finished = ++done;
        if (options.progress) options.progress(finished, total);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.timings.groups_ms = ms_since(t1);

  // Merge in worker order so equal worker counts sum in identical order.
  const auto t2 = Clock::now();
  for (int w = 1; w < workers; ++w) partial[0].merge(partial[static_cast<std::size_t>(w)]);
  if (options.collect_diagnostics) {
    result.diagnostics.reserve(static_cast<std::size_t>(total));
    for (auto& block : diagnostics)
      result.diagnostics.insert(result.diagnostics.end(), block.begin(), block.end());
  }

  result.output = exp_transform(partial[0].finalize());
  result.timings.finalize_ms = ms_since(t2);
  return result;
}

} // namespace pdd
