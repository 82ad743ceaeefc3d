#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kernelrmt/experiment.hpp"

namespace kernelrmt::detail {

using Metrics = std::map<std::string, double>;
using CellFn = std::function<Metrics(const ExperimentConfig&, std::size_t n, std::size_t p, std::uint64_t seed)>;

/// Runs `fn` for every (dims entry, repeat), on up to `parallel` threads, and
/// returns the records in (dims order, repeat) order.
std::vector<ExperimentRecord> run_cells(const ExperimentConfig& cfg, std::size_t parallel, const CellFn& fn);

const KernelSpec& require_kernel(const ExperimentConfig& cfg);

}  // namespace kernelrmt::detail
