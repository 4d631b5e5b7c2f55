#include "mtrend/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mtrend/isotonic.hpp"
#include "mtrend/parallel.hpp"

namespace mtrend {

namespace {

std::size_t grid_count(double extent, double step) {
  return static_cast<std::size_t>(std::llround(extent / step));
}

struct RepOutcome {
  double value = 0.0;
  double location = 0.0;
  bool lower_hit = false;
  bool upper_hit = false;
};

// Per-worker scratch space; one instance per chunk so workers never share it.
struct Scratch {
  std::vector<double> path;
  std::vector<double> xs;
  std::vector<double> work;
  std::vector<std::size_t> knots;
};

using RepFn = std::function<RepOutcome(Stream&, Scratch&)>;
using ScratchInit = std::function<void(Scratch&)>;

LimitSample run_reps(LimitLaw law, std::size_t reps, const BmGrid& grid,
                     std::uint64_t seed, unsigned threads, const ScratchInit& init,
                     const RepFn& rep) {
  if (reps == 0) throw std::invalid_argument("limit sample needs at least one replication");
  LimitSample out;
  out.law = law;
  out.grid = grid;
  out.reps = reps;
  out.seed = seed;
  out.values.resize(reps);
  out.locations.resize(reps);
  std::vector<std::uint8_t> hits(reps, 0);

  parallel_for(reps, threads, [&](std::size_t begin, std::size_t end) {
    Scratch scratch;
    init(scratch);
    for (std::size_t r = begin; r < end; ++r) {
      Stream stream = Stream::derive(seed, r);
      const RepOutcome o = rep(stream, scratch);
      out.values[r] = o.value;
      out.locations[r] = o.location;
      hits[r] = static_cast<std::uint8_t>((o.lower_hit ? 1 : 0) | (o.upper_hit ? 2 : 0));
    }
  });

  std::size_t lower = 0, upper = 0;
  for (auto h : hits) {
    lower += (h & 1) ? 1 : 0;
    upper += (h & 2) ? 1 : 0;
  }
  out.diagnostics.lower_hit_fraction = static_cast<double>(lower) / static_cast<double>(reps);
  out.diagnostics.upper_hit_fraction = static_cast<double>(upper) / static_cast<double>(reps);
  return out;
}

void fill_abscissas(const BmGrid& grid, std::vector<double>& xs) {
  xs.resize(grid.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = grid.abscissa(i);
}

std::string fraction_message(const char* what, double fraction) {
  std::ostringstream os;
  os << what << " in " << fraction * 100.0 << "% of replications";
  return os.str();
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

}  // namespace

void BmGrid::validate() const {
  if (!std::isfinite(step) || !(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower > 0.0 || upper < 0.0 ||
      !(upper > lower)) {
    throw std::invalid_argument("grid window must satisfy lower <= 0 <= upper, lower < upper");
  }
  if (size() < 2) throw std::invalid_argument("grid window is narrower than one step");
}

std::size_t BmGrid::left_count() const { return grid_count(-lower, step); }
std::size_t BmGrid::right_count() const { return grid_count(upper, step); }

void two_sided_bm(const BmGrid& grid, Stream& stream, std::span<double> out) {
  const std::size_t left = grid.left_count();
  const std::size_t right = grid.right_count();
  if (out.size() != left + right + 1) {
    throw std::invalid_argument("two_sided_bm: output size does not match the grid");
  }
  const double sd = std::sqrt(grid.step);
  // Increments are drawn straight into the output and then summed in place.
  stream.fill_normal(out.subspan(left + 1, right), sd);
  stream.fill_normal(out.subspan(0, left), sd);
  out[left] = 0.0;
  for (std::size_t i = left + 1; i < out.size(); ++i) out[i] += out[i - 1];
  // Left arm: out[left-1-j] holds the j-th increment moving away from zero.
  for (std::size_t j = 0; j < left / 2; ++j) std::swap(out[j], out[left - 1 - j]);
  for (std::size_t i = left; i-- > 0;) out[i] += out[i + 1];
}

std::vector<double> two_sided_bm(const BmGrid& grid, Stream& stream) {
  grid.validate();
  std::vector<double> out(grid.size());
  two_sided_bm(grid, stream, out);
  return out;
}

std::string law_name(const LimitLaw& law) {
  struct Visitor {
    std::string operator()(const ChernoffLaw&) const { return "chernoff"; }
    std::string operator()(const BoundaryLaw&) const { return "boundary"; }
    std::string operator()(const PenalizedLaw&) const { return "penalized"; }
  };
  return std::visit(Visitor{}, law);
}

BmGrid default_chernoff_grid() { return {1e-3, -2.5, 2.5}; }

BmGrid default_boundary_grid(double ell, double phi1_prime, double sigma) {
  require_positive(phi1_prime, "phi'(1)");
  require_positive(sigma, "sigma");
  const double scale = std::pow(std::max(1.0, sigma / phi1_prime), 2.0 / 3.0);
  return {1e-3, -5.0 * scale, ell};
}

BmGrid default_penalized_grid(double alpha, double phi1, double phi1_prime, double sigma) {
  require_positive(phi1_prime, "phi'(1)");
  return {1e-3, 0.0, 5.0 * (sigma + alpha * phi1) / phi1_prime};
}

LimitSample chernoff_sample(std::size_t reps, const BmGrid& grid_in, std::uint64_t seed,
                            const SamplerOptions& options) {
  grid_in.validate();
  BmGrid grid = grid_in;
  for (int widen = 0;; ++widen) {
    auto init = [&](Scratch& s) {
      s.path.resize(grid.size());
      fill_abscissas(grid, s.xs);
      s.work.resize(grid.size());
      for (std::size_t i = 0; i < s.xs.size(); ++i) s.work[i] = s.xs[i] * s.xs[i];
    };
    auto rep = [&](Stream& stream, Scratch& s) {
      two_sided_bm(grid, stream, s.path);
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < s.path.size(); ++i) {
        const double v = s.path[i] + s.work[i];
        if (v < best) {  // strict: ties go to the smallest s
          best = v;
          arg = i;
        }
      }
      return RepOutcome{2.0 * s.xs[arg], s.xs[arg], arg == 0, arg + 1 == s.path.size()};
    };
    LimitSample sample = run_reps(ChernoffLaw{}, reps, grid, seed, options.threads, init, rep);
    sample.diagnostics.widenings = widen;

    const double hit =
        sample.diagnostics.lower_hit_fraction + sample.diagnostics.upper_hit_fraction;
    if (hit > options.warn_fraction) {
      if (options.auto_widen && widen < options.max_widenings) {
        grid.lower *= 2.0;
        grid.upper *= 2.0;
        continue;
      }
      sample.diagnostics.warning = true;
      sample.diagnostics.message = fraction_message("argmin on the grid boundary", hit);
    }
    return sample;
  }
}

LimitSample boundary_limit_sample(double ell, double phi1_prime, double sigma,
                                  std::size_t reps, const BmGrid& grid_in, std::uint64_t seed,
                                  const SamplerOptions& options) {
  grid_in.validate();
  require_positive(phi1_prime, "phi'(1)");
  require_positive(sigma, "sigma");
  if (!std::isfinite(ell) || !(ell > 0.0) || ell > grid_in.upper * (1.0 + 1e-12)) {
    throw std::invalid_argument("boundary law: ell must lie in (0, grid upper end]");
  }
  if (!(grid_in.lower < 0.0) || grid_in.left_count() == 0) {
    throw std::invalid_argument("boundary law needs a grid extending left of 0");
  }
  if (grid_count(ell, grid_in.step) == 0) {
    throw std::invalid_argument("boundary law: ell is below one grid step");
  }

  const BoundaryLaw law{ell, phi1_prime, sigma};
  BmGrid grid{grid_in.step, grid_in.lower, ell};
  for (int widen = 0;; ++widen) {
    const std::size_t zero = grid.zero_index();
    auto init = [&](Scratch& s) {
      s.path.resize(grid.size());
      s.work.resize(grid.size());
      fill_abscissas(grid, s.xs);
    };
    auto rep = [&](Stream& stream, Scratch& s) {
      two_sided_bm(grid, stream, s.path);
      for (std::size_t i = 0; i < s.path.size(); ++i) {
        s.work[i] = sigma * s.path[i] + 0.5 * phi1_prime * s.xs[i] * s.xs[i];
      }
      convex_minorant_knots(s.xs, s.work, s.knots);
      const auto it = std::lower_bound(s.knots.begin(), s.knots.end(), zero);
      const std::size_t b = *it;
      const std::size_t a = *(it - 1);
      const double slope = (s.work[b] - s.work[a]) / (s.xs[b] - s.xs[a]);
      return RepOutcome{slope - ell * phi1_prime, s.xs[a], a == 0, false};
    };
    LimitSample sample = run_reps(law, reps, grid, seed, options.threads, init, rep);
    sample.diagnostics.widenings = widen;

    const double hit = sample.diagnostics.lower_hit_fraction;
    if (hit > options.warn_fraction) {
      if (options.auto_widen && widen < options.max_widenings) {
        grid.lower *= 2.0;
        continue;
      }
      sample.diagnostics.warning = true;
      sample.diagnostics.message =
          fraction_message("minorant through 0 anchored at the left window end", hit);
    }
    return sample;
  }
}

LimitSample penalized_limit_sample(double alpha, double phi1, double phi1_prime,
                                   double sigma, std::size_t reps, const BmGrid& grid_in,
                                   std::uint64_t seed, const SamplerOptions& options) {
  grid_in.validate();
  require_positive(alpha, "alpha");
  require_positive(phi1, "phi(1)");
  require_positive(phi1_prime, "phi'(1)");
  require_positive(sigma, "sigma");
  if (grid_in.right_count() < 2) {
    throw std::invalid_argument("penalized law needs at least two grid points right of 0");
  }

  const PenalizedLaw law{alpha, phi1, phi1_prime, sigma};
  const double offset = alpha * phi1;
  BmGrid grid{grid_in.step, 0.0, grid_in.upper};
  for (int widen = 0;; ++widen) {
    auto init = [&](Scratch& s) {
      s.path.resize(grid.size());
      fill_abscissas(grid, s.xs);
      s.work.resize(grid.size());
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        s.work[i] = offset + 0.5 * phi1_prime * s.xs[i] * s.xs[i];
      }
    };
    auto rep = [&](Stream& stream, Scratch& s) {
      two_sided_bm(grid, stream, s.path);
      std::size_t arg = 1;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < s.path.size(); ++i) {
        const double v = (sigma * s.path[i] - s.work[i]) / s.xs[i];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      return RepOutcome{best, s.xs[arg], arg == 1, arg + 1 == s.path.size()};
    };
    LimitSample sample = run_reps(law, reps, grid, seed, options.threads, init, rep);
    sample.diagnostics.widenings = widen;

    const double upper = sample.diagnostics.upper_hit_fraction;
    const double lower = sample.diagnostics.lower_hit_fraction;
    if (upper > options.warn_fraction && options.auto_widen && widen < options.max_widenings) {
      grid.upper *= 2.0;
      continue;
    }
    if (upper > options.warn_fraction) {
      sample.diagnostics.warning = true;
      sample.diagnostics.message = fraction_message("supremum at the right window end", upper);
    } else if (lower > options.warn_fraction) {
      sample.diagnostics.warning = true;
      sample.diagnostics.message = fraction_message("supremum at the first grid point", lower);
    }
    return sample;
  }
}

BmGrid default_grid(const LimitLaw& law) {
  struct Visitor {
    BmGrid operator()(const ChernoffLaw&) const { return default_chernoff_grid(); }
    BmGrid operator()(const BoundaryLaw& b) const {
      return default_boundary_grid(b.ell, b.phi1_prime, b.sigma);
    }
    BmGrid operator()(const PenalizedLaw& p) const {
      return default_penalized_grid(p.alpha, p.phi1, p.phi1_prime, p.sigma);
    }
  };
  return std::visit(Visitor{}, law);
}

LimitSample sample_limit(const LimitLaw& law, std::size_t reps, const BmGrid& grid,
                         std::uint64_t seed, const SamplerOptions& options) {
  struct Visitor {
    std::size_t reps;
    const BmGrid& grid;
    std::uint64_t seed;
    const SamplerOptions& options;
    LimitSample operator()(const ChernoffLaw&) const {
      return chernoff_sample(reps, grid, seed, options);
    }
    LimitSample operator()(const BoundaryLaw& b) const {
      return boundary_limit_sample(b.ell, b.phi1_prime, b.sigma, reps, grid, seed, options);
    }
    LimitSample operator()(const PenalizedLaw& p) const {
      return penalized_limit_sample(p.alpha, p.phi1, p.phi1_prime, p.sigma, reps, grid, seed,
                                    options);
    }
  };
  return std::visit(Visitor{reps, grid, seed, options}, law);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double z) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), z);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) throw std::out_of_range("quantile level must lie in (0, 1)");
  const double np = p * static_cast<double>(sorted_.size());
  const double nearest = std::round(np);
  const double k = std::abs(np - nearest) <= 1e-9 * np ? nearest : std::ceil(np);
  const auto idx = std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, sorted_.size());
  return sorted_[idx - 1];
}

double QuantileTable::at(double p) const {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (std::abs(ps[i] - p) <= 1e-12) return quantiles[i];
  }
  throw std::out_of_range("quantile table has no entry for p=" + std::to_string(p));
}

QuantileTable quantile_table(const LimitSample& sample, std::span<const double> ps) {
  if (ps.empty()) throw std::invalid_argument("quantile table needs at least one level");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i] > 0.0) || !(ps[i] < 1.0) || (i > 0 && !(ps[i] > ps[i - 1]))) {
      throw std::invalid_argument("quantile levels must be strictly increasing in (0, 1)");
    }
  }
  const EmpiricalCdf cdf(sample.values);
  QuantileTable t;
  t.ps.assign(ps.begin(), ps.end());
  t.quantiles.reserve(ps.size());
  for (double p : ps) t.quantiles.push_back(cdf.quantile(p));
  t.law = sample.law;
  t.grid = sample.grid;
  t.reps = sample.reps;
  t.seed = sample.seed;
  t.diagnostics = sample.diagnostics;
  return t;
}

QuantileTable chernoff_quantiles(std::span<const double> ps, std::size_t reps,
                                 const BmGrid& grid, std::uint64_t seed,
                                 const SamplerOptions& options) {
  return quantile_table(chernoff_sample(reps, grid, seed, options), ps);
}

}  // namespace mtrend
