#include "sdt/engine.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace sdt {

void ReplicationPlan::validate() const {
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (replicates > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("replicates must fit in 32 bits");
  }
  if (n < 1) throw InputError("sample size must be at least 1");
}

StateGrid::StateGrid(std::vector<std::string> names, std::vector<std::vector<double>> values,
                     Constraint constraint)
    : names_(std::move(names)), values_(std::move(values)), constraint_(std::move(constraint)) {
  if (names_.size() != values_.size()) throw InputError("one value list per grid parameter is required");
  if (names_.empty()) throw InputError("state grid has no parameters");
  for (std::size_t d = 0; d < values_.size(); ++d) {
    if (values_[d].empty()) throw InputError("grid parameter '" + names_[d] + "' has no values");
    for (double v : values_[d]) require_unit_interval(v, names_[d].c_str());
  }
}

std::vector<std::uint32_t> StateGrid::admitted() const {
  const std::size_t dim = dimension();
  std::vector<std::uint32_t> out;
  std::vector<std::uint32_t> c(dim, 0);
  std::vector<double> x(dim);
  for (;;) {
    for (std::size_t d = 0; d < dim; ++d) x[d] = values_[d][c[d]];
    if (admits(x)) out.insert(out.end(), c.begin(), c.end());
    std::size_t d = dim;
    while (d > 0) {
      --d;
      if (++c[d] < values_[d].size()) break;
      c[d] = 0;
      if (d == 0) return out;
    }
  }
}

std::vector<double> StateGrid::point(std::span<const std::uint32_t> coords) const {
  std::vector<double> x(coords.size());
  for (std::size_t d = 0; d < coords.size(); ++d) x[d] = values_[d][coords[d]];
  return x;
}

std::vector<double> StateGrid::uniform(std::size_t count, double lo, double hi) {
  if (count < 1) throw InputError("grid needs at least one value");
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw InputError("grid bounds must satisfy 0 <= lo <= hi <= 1");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double steps = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = lo + (hi - lo) * (static_cast<double>(i) / steps);
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

StateGrid::Constraint StateGrid::band(std::size_t i, std::size_t j, double width) {
  return [i, j, width](std::span<const double> x) { return std::abs(x[i] - x[j]) <= width + 1e-12; };
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), count));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

void write_grid_csv(std::ostream& out, const GridResult& result, bool full_precision) {
  const char* fmt = full_precision ? "%.17g" : "%.6f";
  char buf[64];
  for (const auto& name : result.parameter_names) out << name << ',';
  out << "expected_welfare,regret,mc_stderr\n";
  for (const auto& row : result.rows) {
    for (double v : row.state) {
      std::snprintf(buf, sizeof buf, fmt, v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, fmt, row.risk.expected_welfare);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, fmt, row.risk.regret);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, fmt, row.risk.mc_stderr);
    out << buf << '\n';
  }
}

namespace detail {

std::vector<std::size_t> corner_states(std::span<const std::uint32_t> admitted, std::size_t dim,
                                       std::span<const std::size_t> unsampled,
                                       const std::vector<std::size_t>& group) {
  if (unsampled.empty()) return group;
  std::vector<std::uint32_t> lo(unsampled.size(), std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint32_t> hi(unsampled.size(), 0);
  for (std::size_t s : group) {
    for (std::size_t k = 0; k < unsampled.size(); ++k) {
      const std::uint32_t c = admitted[s * dim + unsampled[k]];
      lo[k] = std::min(lo[k], c);
      hi[k] = std::max(hi[k], c);
    }
  }
  // A full box of contiguous coordinates has exactly prod(hi - lo + 1) members.
  std::size_t box = 1;
  for (std::size_t k = 0; k < unsampled.size(); ++k) box *= hi[k] - lo[k] + 1;
  if (box != group.size()) return group;

  std::vector<std::size_t> out;
  for (std::size_t s : group) {
    bool corner = true;
    for (std::size_t k = 0; k < unsampled.size() && corner; ++k) {
      const std::uint32_t c = admitted[s * dim + unsampled[k]];
      corner = c == lo[k] || c == hi[k];
    }
    if (corner) out.push_back(s);
  }
  return out;
}

void finish(GridResult& result) {
  result.argmax = 0;
  result.max_regret = result.rows.front().risk.regret;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].risk.regret > result.max_regret) {
      result.max_regret = result.rows[i].risk.regret;
      result.argmax = i;
    }
  }
}

}  // namespace detail
}  // namespace sdt
