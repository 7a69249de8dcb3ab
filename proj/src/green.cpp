#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lcoal/error.hpp"
#include "lcoal/geometry.hpp"
#include "lcoal/rng.hpp"
#include "lcoal/simd/kernels.hpp"

namespace lcoal {

namespace {

// sum_{j >= n} j^{-s} by Euler-Maclaurin (n large)
double zeta_tail(double s, double n) {
  return std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1.0) / 12.0 -
         s * (s + 1.0) * (s + 2.0) * std::pow(n, -s - 3.0) / 720.0;
}

double determinant(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r * n + c)]) > std::fabs(a[static_cast<std::size_t>(piv * n + c)])) piv = r;
    if (a[static_cast<std::size_t>(piv * n + c)] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(piv * n + k)], a[static_cast<std::size_t>(c * n + k)]);
      det = -det;
    }
    det *= a[static_cast<std::size_t>(c * n + c)];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[static_cast<std::size_t>(r * n + c)] / a[static_cast<std::size_t>(c * n + c)];
      for (int k = c; k < n; ++k) a[static_cast<std::size_t>(r * n + k)] -= f * a[static_cast<std::size_t>(c * n + k)];
    }
  }
  return det;
}

// Cells of the L1 ball of radius R stored as rows along the first coordinate.
struct BallGrid {
  int d, R;
  struct Row {
    int norm;        // L1 norm of the trailing coordinates
    int half;        // row covers x in [-half, half]
    std::size_t off; // offset of x = -half
    int mirror;      // row of the negated trailing coordinates
  };
  std::vector<Row> rows;
  std::vector<std::vector<int>> prefix;
  std::unordered_map<long long, int> index;
  std::size_t cells = 0;

  long long key(const std::vector<int>& p) const {
    long long k = 0;
    for (int x : p) k = k * (2LL * R + 1) + (x + R);
    return k;
  }
  int find(const std::vector<int>& p) const {
    int n = 0;
    for (int x : p) n += std::abs(x);
    if (n > R) return -1;
    auto it = index.find(key(p));
    return it == index.end() ? -1 : it->second;
  }

  BallGrid(int dim, int radius, long max_cells) : d(dim), R(radius) {
    std::vector<int> p(static_cast<std::size_t>(d - 1), 0);
    auto rec = [&](auto&& self, int pos, int used) -> void {
      if (pos == d - 1) {
        Row r{used, R - used, cells, -1};
        cells += static_cast<std::size_t>(2 * r.half + 1);
        if (static_cast<long>(cells) > max_cells)
          throw Error(ErrorCode::SizeOverflow, "lattice sum box exceeds cell budget");
        index.emplace(key(p), static_cast<int>(rows.size()));
        rows.push_back(r);
        prefix.push_back(p);
        return;
      }
      for (int x = -(R - used); x <= R - used; ++x) {
        p[static_cast<std::size_t>(pos)] = x;
        self(self, pos + 1, used + std::abs(x));
      }
    };
    rec(rec, 0, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto q = prefix[i];
      for (int& x : q) x = -x;
      rows[i].mirror = find(q);
    }
  }
};

}  // namespace

std::string to_string(GreenMethod m) { return m == GreenMethod::LatticeSum ? "LATTICE_SUM" : "MONTE_CARLO"; }

std::vector<double> return_probabilities(const WalkSpec& walk, int k_max, long max_cells) {
  walk.validate();
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 1");
  const int d = walk.dim;
  const int s1 = walk.max_l1();
  const int M = k_max / 2;
  BallGrid grid(d, (M + 1) * s1, max_cells);
  std::vector<double> cur(grid.cells, 0.0), nxt(grid.cells, 0.0);
  const std::vector<int> zero(static_cast<std::size_t>(d - 1), 0);
  const auto& origin = grid.rows[static_cast<std::size_t>(grid.find(zero))];
  cur[origin.off + static_cast<std::size_t>(origin.half)] = 1.0;

  // source row of each (row, step)
  const std::size_t S = walk.steps.size();
  std::vector<int> src(grid.rows.size() * S, -1);
  std::vector<int> q(static_cast<std::size_t>(d - 1));
  for (std::size_t r = 0; r < grid.rows.size(); ++r)
    for (std::size_t s = 0; s < S; ++s) {
      for (int i = 1; i < d; ++i)
        q[static_cast<std::size_t>(i - 1)] = grid.prefix[r][static_cast<std::size_t>(i - 1)] - walk.steps[s][static_cast<std::size_t>(i)];
      src[r * S + s] = grid.find(q);
    }

  // sum_x f(x) g(-x) over the support of radius `a`
  auto reflect_dot = [&](const std::vector<double>& f, const std::vector<double>& g, int a) {
    long double acc = 0.0L;
    for (const auto& row : grid.rows) {
      const int h = std::min(row.half, a - row.norm);
      if (h < 0) continue;
      const auto& mr = grid.rows[static_cast<std::size_t>(row.mirror)];
      const double* fr = f.data() + row.off + row.half;
      const double* gr = g.data() + mr.off + mr.half;
      double s = 0.0;
      for (int x = -h; x <= h; ++x) s += fr[x] * gr[-x];
      acc += s;
    }
    return static_cast<double>(acc);
  };

  std::vector<double> p(static_cast<std::size_t>(2 * M + 2), 0.0);
  for (int m = 0; m <= M; ++m) {
    const int a_cur = m * s1;
    const int a_nxt = (m + 1) * s1;
    p[static_cast<std::size_t>(2 * m)] = reflect_dot(cur, cur, a_cur);
    for (std::size_t r = 0; r < grid.rows.size(); ++r) {
      const auto& row = grid.rows[r];
      const int h = std::min(row.half, a_nxt - row.norm);
      if (h < 0) continue;
      double* out = nxt.data() + row.off + row.half;
      std::fill(out - h, out + h + 1, 0.0);
      for (std::size_t s = 0; s < S; ++s) {
        const int sr = src[r * S + s];
        if (sr < 0) continue;
        const auto& srow = grid.rows[static_cast<std::size_t>(sr)];
        const int as = std::min(srow.half, a_cur - srow.norm);
        if (as < 0) continue;
        const int sx = walk.steps[s][0];
        const int lo = std::max(-h, -as + sx);
        const int hi = std::min(h, as + sx);
        if (lo > hi) continue;
        const double* in = cur.data() + srow.off + srow.half;
        simd::axpy(walk.probs[s], in + (lo - sx), out + lo, static_cast<std::size_t>(hi - lo + 1));
      }
    }
    p[static_cast<std::size_t>(2 * m + 1)] = reflect_dot(nxt, cur, a_nxt);
    std::swap(cur, nxt);
  }
  p.resize(static_cast<std::size_t>(k_max) + 1);
  return p;
}

namespace {

int default_k_max(int d) {
  if (d <= 3) return 240;
  if (d == 4) return 100;
  if (d == 5) return 44;
  return 40;
}

GreenEstimate lattice_sum(const WalkSpec& walk, const GreenOptions& opt) {
  const int d = walk.dim;
  const int k_max = opt.k_max > 0 ? std::max(opt.k_max, 40) : default_k_max(d);
  auto p = return_probabilities(walk, k_max | 1, opt.max_cells);  // odd count so pairs are complete
  const int M = static_cast<int>(p.size()) / 2 - 1;                  // pairs j = 0..M
  std::vector<double> qj(static_cast<std::size_t>(M) + 1);
  long double head = 0.0L;
  for (int j = 0; j <= M; ++j) {
    qj[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(2 * j)] + p[static_cast<std::size_t>(2 * j + 1)];
    head += qj[static_cast<std::size_t>(j)];
  }
  // Fit q_j j^{d/2} = b0 + b1 u + b2 u^2 with u = M/j on j in [M/2, M].
  const double half_d = 0.5 * d;
  auto tail_for = [&](int terms) {
    std::vector<double> ata(static_cast<std::size_t>(terms * terms), 0.0), atb(static_cast<std::size_t>(terms), 0.0);
    for (int j = M / 2; j <= M; ++j) {
      const double u = static_cast<double>(M) / j;
      const double y = qj[static_cast<std::size_t>(j)] * std::pow(static_cast<double>(j), half_d);
      double basis[3] = {1.0, u, u * u};
      for (int a = 0; a < terms; ++a) {
        atb[static_cast<std::size_t>(a)] += basis[a] * y;
        for (int b = 0; b < terms; ++b) ata[static_cast<std::size_t>(a * terms + b)] += basis[a] * basis[b];
      }
    }
    // Gaussian elimination on the small normal system
    for (int c = 0; c < terms; ++c) {
      for (int r = c + 1; r < terms; ++r) {
        const double f = ata[static_cast<std::size_t>(r * terms + c)] / ata[static_cast<std::size_t>(c * terms + c)];
        for (int k = c; k < terms; ++k) ata[static_cast<std::size_t>(r * terms + k)] -= f * ata[static_cast<std::size_t>(c * terms + k)];
        atb[static_cast<std::size_t>(r)] -= f * atb[static_cast<std::size_t>(c)];
      }
    }
    std::vector<double> coef(static_cast<std::size_t>(terms));
    for (int r = terms - 1; r >= 0; --r) {
      double s = atb[static_cast<std::size_t>(r)];
      for (int k = r + 1; k < terms; ++k) s -= ata[static_cast<std::size_t>(r * terms + k)] * coef[static_cast<std::size_t>(k)];
      coef[static_cast<std::size_t>(r)] = s / ata[static_cast<std::size_t>(r * terms + r)];
    }
    double t = 0.0;
    for (int a = 0; a < terms; ++a)
      t += coef[static_cast<std::size_t>(a)] * std::pow(static_cast<double>(M), a) * zeta_tail(half_d + a, M + 1.0);
    return t;
  };
  const double t3 = tail_for(3);
  const double t2 = tail_for(2);
  GreenEstimate g;
  g.method = GreenMethod::LatticeSum;
  g.head = static_cast<double>(head);
  g.tail = t3;
  g.estimate = g.head + t3;
  g.error = std::fabs(t3 - t2) + 1e-13 * g.estimate * M;
  g.budget = k_max;
  return g;
}

GreenEstimate monte_carlo(const WalkSpec& walk, const GreenOptions& opt) {
  const int d = walk.dim;
  if (opt.replicas < 2 || opt.horizon < 1)
    throw Error(ErrorCode::InvalidArgument, "Monte Carlo Green function needs replicas >= 2 and horizon >= 1");
  AliasTable steps(walk.probs);
  const int shards = std::max(1, opt.shards);
  long double sum = 0.0L, sumsq = 0.0L;
  std::vector<int> pos(static_cast<std::size_t>(d));
  for (int sh = 0; sh < shards; ++sh) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(sh)));
    const long reps = opt.replicas / shards + (sh < opt.replicas % shards ? 1 : 0);
    for (long r = 0; r < reps; ++r) {
      std::fill(pos.begin(), pos.end(), 0);
      long visits = 1;
      int nonzero = 0;
      for (long n = 0; n < opt.horizon; ++n) {
        const auto& st = walk.steps[steps.sample(rng)];
        for (int i = 0; i < d; ++i) {
          const int before = pos[static_cast<std::size_t>(i)];
          const int after = before + st[static_cast<std::size_t>(i)];
          nonzero += (after != 0) - (before != 0);
          pos[static_cast<std::size_t>(i)] = after;
        }
        visits += (nonzero == 0);
      }
      sum += visits;
      sumsq += static_cast<long double>(visits) * visits;
    }
  }
  const double n = static_cast<double>(opt.replicas);
  const double mean = static_cast<double>(sum / n);
  const double var = static_cast<double>((sumsq - sum * sum / n) / (n - 1.0));
  const double se = std::sqrt(std::max(var, 0.0) / n);
  // Local limit tail beyond the horizon.
  const double det = determinant(walk.covariance(), d);
  const double c = std::pow(2.0 * M_PI, -0.5 * d) / std::sqrt(det);
  const double tail = c * zeta_tail(0.5 * d, static_cast<double>(opt.horizon) + 1.0);
  GreenEstimate g;
  g.method = GreenMethod::MonteCarlo;
  g.head = mean;
  g.tail = tail;
  g.estimate = mean + tail;
  g.standard_error = se;
  g.error = 3.0 * se + tail * 5.0 / static_cast<double>(opt.horizon);
  g.budget = opt.replicas * opt.horizon;
  return g;
}

}  // namespace

GreenEstimate green_function(const WalkSpec& walk, const GreenOptions& options) {
  walk.validate();
  if (walk.dim < 3) throw Error(ErrorCode::DimensionTooLow, "Green function needs d >= 3 (transient walk)");
  return options.method == GreenMethod::LatticeSum ? lattice_sum(walk, options) : monte_carlo(walk, options);
}

}  // namespace lcoal
