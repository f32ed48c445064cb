#include "lrpop/bench.h"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "lrpop/errors.h"

namespace lrpop {

using nlohmann::json;

const char* family_name(Family f) {
  return f == Family::Monomial ? "monomial" : "bernstein";
}

std::optional<Family> parse_family(const std::string& s) {
  if (s == "monomial") return Family::Monomial;
  if (s == "bernstein") return Family::Bernstein;
  return std::nullopt;
}

BenchSpec default_bench(Family f) {
  BenchSpec s;
  s.family = f;
  if (f == Family::Monomial) {
    s.r = 1;
    s.d = 3;
    s.n_values = {2, 3, 4, 5, 6};
    s.orders = {2, 3};
  } else {
    s.r = 2;
    s.d = 2;
    s.n_values = {10, 50, 200};
    s.orders = {2};
  }
  return s;
}

std::uint64_t instance_seed(std::uint64_t base, int n) {
  // splitmix64 finalizer over (base, n).
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CPPoly make_instance(const BenchSpec& spec, int n) {
  const std::uint64_t seed = instance_seed(spec.seed, n);
  CPPoly f = spec.family == Family::Monomial
                 ? gen_monomial_instance(n, spec.d, spec.r, seed)
                 : gen_bernstein_instance(n, spec.d, spec.r, spec.delta, seed);
  if (spec.basis && *spec.basis != f.basis()) f = basis_convert(f, *spec.basis);
  return f;
}

namespace {

void validate(const BenchSpec& spec) {
  if (spec.n_values.empty()) throw InvalidInput("bench needs at least one value of n");
  if (spec.orders.empty() && !spec.dense) throw InvalidInput("bench needs at least one row");
  if (spec.r < 1 || spec.d < 0) throw InvalidInput("bench needs r >= 1 and d >= 0");
  for (int n : spec.n_values) {
    if (n < 1) throw InvalidInput("bench values of n must be positive");
  }
  for (int k : spec.orders) {
    if (k < 1) throw InvalidInput("bench orders must be positive");
  }
  if (!(spec.timeout_seconds > 0.0)) throw InvalidInput("bench timeout must be positive");
}

BenchCell run_cell(const BenchSpec& spec, BenchCell cell, const std::atomic<bool>* cancel) {
  const CPPoly f = make_instance(spec, cell.n);
  InstanceInfo info = describe(f, family_name(spec.family));
  info.seed = instance_seed(spec.seed, cell.n);
  if (spec.family == Family::Bernstein) info.delta = spec.delta;

  PipelineOptions opts = spec.pipeline;
  opts.order = cell.order;
  opts.solver.cancel = cancel;
  opts.solver.deadline = std::chrono::steady_clock::now() +
                         std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(spec.timeout_seconds));
  try {
    cell.report = cell.method == Method::LowRank ? solve_cp(f, opts, info)
                                                 : solve_dense(f, opts, info);
    cell.timed_out = cell.report.status == SolveStatus::TimeLimit;
  } catch (const std::exception& e) {
    cell.report = RunReport{};
    cell.report.instance = info;
    cell.report.method = cell.method;
    cell.report.order = cell.order;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

BenchTable run_bench(const BenchSpec& spec, const std::atomic<bool>* cancel,
                     const std::function<void(const BenchCell&)>& on_cell) {
  validate(spec);
  BenchTable table;
  table.spec = spec;
  for (int k : spec.orders) {
    for (int n : spec.n_values) table.cells.push_back({n, Method::LowRank, k, {}, false, {}});
  }
  if (spec.dense) {
    for (int n : spec.n_values) {
      table.cells.push_back({n, Method::Dense, (n * spec.d + 1) / 2, {}, false, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < table.cells.size(); i = next++) {
      BenchCell& cell = table.cells[i];
      if (cancel && cancel->load()) {
        cell.timed_out = true;
        cell.report.status = SolveStatus::TimeLimit;
        cell.report.message = "cancelled";
      } else {
        cell = run_cell(spec, cell, cancel);
      }
      if (on_cell) {
        std::lock_guard<std::mutex> lock(done_mutex);
        on_cell(cell);
      }
    }
  };
  const int jobs = std::clamp(spec.jobs, 1, static_cast<int>(table.cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return table;
}

namespace {

std::string row_label(const BenchCell& c) {
  if (c.method == Method::Dense) return "Dense";
  return "k_LR=" + std::to_string(c.order);
}

// Rows in table order with their cells, one per column.
std::vector<std::pair<std::string, std::vector<const BenchCell*>>> rows_of(const BenchTable& t) {
  std::vector<std::pair<std::string, std::vector<const BenchCell*>>> rows;
  const std::size_t cols = t.spec.n_values.size();
  for (std::size_t i = 0; i < t.cells.size(); i += cols) {
    std::vector<const BenchCell*> row;
    for (std::size_t j = 0; j < cols; ++j) row.push_back(&t.cells[i + j]);
    rows.emplace_back(row_label(t.cells[i]), std::move(row));
  }
  return rows;
}

std::string render(const std::string& title, const BenchTable& t,
                   const std::function<std::string(const BenchCell&)>& text) {
  const auto rows = rows_of(t);
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"# variables n"};
  for (int n : t.spec.n_values) header.push_back(std::to_string(n));
  grid.push_back(header);
  for (const auto& [label, cells] : rows) {
    std::vector<std::string> line{label};
    for (const BenchCell* c : cells) line.push_back(text(*c));
    grid.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  }
  std::ostringstream os;
  os << title << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      const std::string& s = grid[i][j];
      if (j == 0) {
        os << s << std::string(width[j] - s.size(), ' ');
      } else {
        os << "  " << std::string(width[j] - s.size(), ' ') << s;
      }
    }
    os << "\n";
    if (i == 0) {
      std::size_t total = width[0];
      for (std::size_t j = 1; j < width.size(); ++j) total += 2 + width[j];
      os << std::string(total, '-') << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::string format_bench(const BenchTable& t) {
  char buf[64];
  bool starred = false;
  auto bound = [&](const BenchCell& c) -> std::string {
    if (c.timed_out || !c.error.empty() || !c.report.lower_bound) return "";
    std::snprintf(buf, sizeof(buf), "%.6f", *c.report.lower_bound);
    std::string s = buf;
    if (c.report.status != SolveStatus::Optimal) {
      s += "*";
      starred = true;
    }
    return s;
  };
  auto time = [&](const BenchCell& c) -> std::string {
    if (c.timed_out || !c.error.empty()) return "";
    std::snprintf(buf, sizeof(buf), "%.3f", c.report.wall_time_seconds);
    return buf;
  };
  const BenchSpec& s = t.spec;
  std::ostringstream title;
  title << "Optimal values, " << family_name(s.family) << " family, r=" << s.r << ", d=" << s.d;
  if (s.family == Family::Bernstein) title << ", delta=" << s.delta;
  std::string out = render(title.str(), t, bound);
  if (starred) out += "* solver stopped before reaching the tolerance\n";
  bool errors = false;
  for (const BenchCell& c : t.cells) errors = errors || !c.error.empty();
  out += "\n" + render("Running times (seconds)", t, time);
  if (errors) {
    out += "\nCells left blank because the relaxation was rejected:\n";
    for (const BenchCell& c : t.cells) {
      if (!c.error.empty()) out += "  " + row_label(c) + ", n=" + std::to_string(c.n) + ": " + c.error + "\n";
    }
  }
  return out;
}

json bench_to_json(const BenchTable& t) {
  const BenchSpec& s = t.spec;
  json cells = json::array();
  for (const BenchCell& c : t.cells) {
    cells.push_back({
        {"n", c.n},
        {"method", method_name(c.method)},
        {"order", c.order},
        {"timed_out", c.timed_out},
        {"error", c.error.empty() ? json(nullptr) : json(c.error)},
        {"report", c.timed_out || !c.error.empty() ? json(nullptr) : report_to_json(c.report)},
    });
  }
  return {
      {"family", family_name(s.family)},
      {"r", s.r},
      {"d", s.d},
      {"delta", s.family == Family::Bernstein ? json(s.delta) : json(nullptr)},
      {"seed", s.seed},
      {"timeout_seconds", s.timeout_seconds},
      {"n_values", s.n_values},
      {"orders", s.orders},
      {"dense", s.dense},
      {"cells", cells},
  };
}

}  // namespace lrpop
