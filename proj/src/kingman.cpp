#include "lcoal/kingman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcoal/error.hpp"
#include "lcoal/rng.hpp"
#include "lcoal/stats.hpp"

namespace lcoal {

std::string to_string(EntranceMethod m) {
  switch (m) {
    case EntranceMethod::Series: return "SERIES";
    case EntranceMethod::SimulateFrom: return "SIMULATE_FROM";
    case EntranceMethod::DeathChain: return "DEATH_CHAIN";
  }
  return "?";
}

namespace {

// Spectral expansion of the block-count law from n0 blocks (n0 = 0 means
// infinitely many). Long double; the error bound tracks cancellation.
BlockCountLaw spectral_law(int n0, double t, int truncation) {
  using ld = long double;
  int top = truncation;
  if (top <= 0) {
    top = 2;
    // |coefficient| <= (2i)^{2i}; stop once the Gaussian factor wins by e^-60.
    while (0.5 * top * (top - 1.0) * t < 2.0 * top * std::log(2.0 * top) + 60.0) ++top;
  }
  if (n0 > 0) top = std::min(top, n0);
  BlockCountLaw out;
  out.n0 = n0;
  out.probs.assign(static_cast<std::size_t>(top) + 1, 0.0);
  const ld eps = std::numeric_limits<ld>::epsilon();
  const ld n = n0;
  double err = 0.0;
  for (int k = 1; k <= top; ++k) {
    ld sum = 0.0L, mag = 0.0L;
    for (int i = k; i <= top; ++i) {
      ld lc = std::log(static_cast<ld>(2 * i - 1)) + std::lgamma(static_cast<ld>(k + i - 1)) -
              std::lgamma(static_cast<ld>(k)) - std::lgamma(static_cast<ld>(k + 1)) -
              std::lgamma(static_cast<ld>(i - k + 1)) - 0.5L * i * (i - 1.0L) * static_cast<ld>(t);
      // Falling over rising factorial of n, which tends to 1 as n grows.
      if (n0 > 0) lc += std::lgamma(n + 1) - std::lgamma(n - i + 1) - std::lgamma(n + i) + std::lgamma(n);
      const ld term = std::exp(lc);
      sum += ((i - k) % 2 ? -term : term);
      mag += term;
    }
    out.probs[static_cast<std::size_t>(k)] = static_cast<double>(sum);
    err += static_cast<double>(mag * eps * 4.0L * static_cast<ld>(top));
  }
  out.error = err;
  return out;
}

// Uniformization: all terms positive, cost about n0 * (rate(n0) t) operations.
BlockCountLaw uniformized_law(int n0, double t) {
  BlockCountLaw out;
  out.n0 = n0;
  out.probs.assign(static_cast<std::size_t>(n0) + 1, 0.0);
  const auto rate = [](int b) { return 0.5 * b * (b - 1.0); };
  const double q = rate(n0);
  if (q == 0.0 || t == 0.0) {
    out.probs[static_cast<std::size_t>(n0)] = 1.0;
    return out;
  }
  const double qt = q * t;
  const long m_hi = static_cast<long>(std::ceil(qt + 12.0 * std::sqrt(qt) + 40.0));
  std::vector<double> v(out.probs.size(), 0.0), w(v.size());
  v[static_cast<std::size_t>(n0)] = 1.0;
  int low = n0;  // lowest state with mass
  double used = 0.0;
  const double log_qt = std::log(qt);
  for (long m = 0; m <= m_hi; ++m) {
    const double lw = -qt + static_cast<double>(m) * log_qt - std::lgamma(static_cast<double>(m) + 1.0);
    if (lw > -745.0) {
      const double pw = std::exp(lw);
      used += pw;
      for (int b = low; b <= n0; ++b) out.probs[static_cast<std::size_t>(b)] += pw * v[static_cast<std::size_t>(b)];
    }
    const int nlow = std::max(1, low - 1);
    for (int b = nlow; b <= n0; ++b) {
      double x = v[static_cast<std::size_t>(b)] * (1.0 - rate(b) / q);
      if (b < n0) x += v[static_cast<std::size_t>(b) + 1] * rate(b + 1) / q;
      w[static_cast<std::size_t>(b)] = x;
    }
    for (int b = nlow; b <= n0; ++b) v[static_cast<std::size_t>(b)] = w[static_cast<std::size_t>(b)];
    low = nlow;
  }
  out.error = std::max(0.0, 1.0 - used) + 1e-13;
  return out;
}

}  // namespace

BlockCountLaw death_chain_law(int n0, double t) {
  if (n0 < 1) throw Error(ErrorCode::InvalidArgument, "death chain needs n0 >= 1");
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time must be >= 0");
  BlockCountLaw out;
  if (t > 0.0 && n0 > 1) {
    out = spectral_law(n0, t, 0);
    if (out.error <= 1e-12) {
      for (double& p : out.probs) p = std::max(p, 0.0);
      out.method = "DEATH_CHAIN";
      return out;
    }
  }
  const double work = 0.5 * n0 * (n0 - 1.0) * t * n0;
  if (work > 2e9)
    throw Error(ErrorCode::TruncationUnstable, "death chain law from n0=" + std::to_string(n0) + " at t=" +
                                                   std::to_string(t) + " is out of reach");
  out = uniformized_law(n0, t);
  out.method = "DEATH_CHAIN";
  return out;
}

BlockCountLaw entrance_law_series(double t, double tolerance, int truncation) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "entrance law needs t > 0");
  BlockCountLaw out = spectral_law(0, t, truncation);
  out.method = "SERIES";
  if (out.error > tolerance)
    throw Error(ErrorCode::TruncationUnstable, "entrance series cancellation error " + std::to_string(out.error) +
                                                   " exceeds tolerance at t=" + std::to_string(t));
  for (double& p : out.probs) p = std::max(p, 0.0);
  return out;
}

int stable_start_size(double t, double stability, int n0) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "stable start size needs t > 0");
  if (n0 <= 0) n0 = 10 * static_cast<int>(std::ceil(2.0 / t));
  n0 = std::max(n0, 2);
  BlockCountLaw cur = death_chain_law(n0, t);
  for (; n0 <= 1'000'000; n0 *= 2) {
    BlockCountLaw next = death_chain_law(2 * n0, t);
    if (total_variation(cur.probs, next.probs) < stability) return n0;
    cur = std::move(next);
  }
  throw Error(ErrorCode::TruncationUnstable, "no stable start size found for t=" + std::to_string(t));
}

namespace {

BlockCountLaw simulate_from(int n0, double t, long replicas, std::uint64_t seed) {
  std::vector<int> outcomes;
  outcomes.reserve(static_cast<std::size_t>(replicas));
  for (long r = 0; r < replicas; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    int b = n0;
    double s = 0.0;
    while (b > 1) {
      s += rng.exponential(0.5 * b * (b - 1.0));
      if (s > t) break;
      --b;
    }
    outcomes.push_back(b);
  }
  BlockCountLaw out;
  out.probs = empirical_distribution(outcomes, static_cast<std::size_t>(n0) + 1);
  out.n0 = n0;
  out.method = "SIMULATE_FROM";
  double noise = 0.0;
  for (double p : out.probs) noise += std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
  out.error = noise;
  return out;
}

}  // namespace

BlockCountLaw kingman_entrance_reference(double t, const EntranceOptions& o) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "entrance law needs t > 0");
  const auto chain = [&] { return death_chain_law(o.n0 > 0 ? o.n0 : stable_start_size(t, o.stability), t); };
  BlockCountLaw law;
  switch (o.method) {
    case EntranceMethod::Series: {
      law = entrance_law_series(t, o.stability);
      if (o.cross_check) {
        const BlockCountLaw other = chain();
        law.cross_check_tv = total_variation(law.probs, other.probs);
        // The chain at a stable n0 sits about 2 * stability from the limit
        // (the gap decays like 1/n0, so the remaining doublings sum to twice the last).
        if (law.cross_check_tv > 2.0 * o.stability + law.error + other.error)
          throw Error(ErrorCode::TruncationUnstable, "series and death chain disagree: TV " +
                                                         std::to_string(law.cross_check_tv));
      }
      return law;
    }
    case EntranceMethod::DeathChain:
      law = chain();
      break;
    case EntranceMethod::SimulateFrom: {
      const int n0 = o.n0 > 0 ? o.n0 : stable_start_size(t, o.stability);
      law = simulate_from(n0, t, o.replicas, o.seed);
      break;
    }
  }
  if (o.cross_check) {
    try {
      const BlockCountLaw series = entrance_law_series(t, o.stability);
      law.cross_check_tv = total_variation(law.probs, series.probs);
      // Sampling noise enters through law.error (zero for the exact chain).
      if (law.cross_check_tv > 2.0 * o.stability + 2.0 * law.error + series.error)
        throw Error(ErrorCode::TruncationUnstable,
                    to_string(o.method) + " and series disagree: TV " + std::to_string(law.cross_check_tv));
    } catch (const Error& e) {
      // A series too ill-conditioned at this t cannot serve as a cross-check.
      if (e.code() != ErrorCode::TruncationUnstable || law.cross_check_tv >= 0.0) throw;
    }
  }
  return law;
}

std::vector<std::vector<double>> kingman_two_time_law(double t1, double t2, const EntranceOptions& options) {
  if (!(t1 > 0.0) || !(t2 > t1)) throw Error(ErrorCode::InvalidArgument, "two-time law needs 0 < t1 < t2");
  const BlockCountLaw first = kingman_entrance_reference(t1, options);
  std::size_t top = first.probs.size();
  while (top > 2 && first.probs[top - 1] < 1e-15) --top;
  std::vector<std::vector<double>> joint(top, std::vector<double>(top, 0.0));
  for (std::size_t i = 1; i < top; ++i) {
    const BlockCountLaw step = death_chain_law(static_cast<int>(i), t2 - t1);
    for (std::size_t j = 1; j <= i; ++j) joint[i][j] = first.probs[i] * step.probs[j];
  }
  return joint;
}

}  // namespace lcoal
