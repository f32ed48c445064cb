#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrpop/pipeline.h"

namespace lrpop {

enum class Family { Monomial, Bernstein };

const char* family_name(Family f);
std::optional<Family> parse_family(const std::string& s);

/// Grid of one benchmark table: rows are relaxation orders (plus an optional
/// dense row), columns are variable counts.
struct BenchSpec {
  Family family = Family::Bernstein;
  int r = 2;
  int d = 2;
  std::vector<int> n_values;
  std::vector<int> orders;
  double delta = 1.0;         // Bernstein family only
  bool dense = false;         // add a dense-hierarchy row
  std::uint64_t seed = 0;
  double timeout_seconds = 300.0;
  int jobs = 1;
  std::optional<Basis> basis;  // convert instances before solving
  PipelineOptions pipeline;    // order and deadline are set per cell
};

/// Defaults of the two published table layouts.
BenchSpec default_bench(Family f);

/// Seed of the instance in column n, so that every row of a column solves
/// the same polynomial.
std::uint64_t instance_seed(std::uint64_t base, int n);

CPPoly make_instance(const BenchSpec& spec, int n);

struct BenchCell {
  int n = 0;
  Method method = Method::LowRank;
  int order = 0;
  RunReport report;
  bool timed_out = false;
  /// Set when the pipeline rejected the cell before solving (e.g. order too
  /// small); the report then only carries the instance.
  std::string error;
};

struct BenchTable {
  BenchSpec spec;
  std::vector<BenchCell> cells;  // row-major: orders (then dense) x n_values
};

/// Runs every cell with at most spec.jobs concurrent solves. Each cell gets
/// its own deadline; `cancel`, when set, stops remaining cells early and
/// interrupts running ones at their next deadline check.
BenchTable run_bench(const BenchSpec& spec, const std::atomic<bool>* cancel = nullptr,
                     const std::function<void(const BenchCell&)>& on_cell = {});

/// Aligned text tables (bounds, then times); timed-out cells are blank and
/// bounds from solves stopped short of the tolerance carry a '*'.
std::string format_bench(const BenchTable& t);

nlohmann::json bench_to_json(const BenchTable& t);

}  // namespace lrpop
