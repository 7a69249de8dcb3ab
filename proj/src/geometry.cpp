#include "lcoal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lcoal/error.hpp"

namespace lcoal {

WalkSpec WalkSpec::simple(int d) {
  if (d < 1) throw Error(ErrorCode::ValidationError, "walk dimension must be >= 1");
  WalkSpec w;
  w.dim = d;
  for (int i = 0; i < d; ++i) {
    for (int s : {1, -1}) {
      std::vector<int> step(static_cast<std::size_t>(d), 0);
      step[static_cast<std::size_t>(i)] = s;
      w.steps.push_back(step);
      w.probs.push_back(1.0 / (2.0 * d));
    }
  }
  return w;
}

void WalkSpec::validate() const {
  std::vector<std::string> errs;
  if (dim < 1) errs.push_back("walk dimension must be >= 1");
  if (steps.empty() || steps.size() != probs.size()) errs.push_back("walk needs one probability per step");
  double total = 0.0;
  for (std::size_t i = 0; i < steps.size() && i < probs.size(); ++i) {
    if (static_cast<int>(steps[i].size()) != dim) errs.push_back("step " + std::to_string(i) + " has wrong dimension");
    if (!(probs[i] >= 0.0)) errs.push_back("step " + std::to_string(i) + " has negative probability");
    total += probs[i];
  }
  if (std::fabs(total - 1.0) > 1e-12) errs.push_back("step probabilities must sum to 1");
  if (errs.empty()) {
    // rank of the support over the reals
    std::vector<std::vector<double>> m;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (probs[i] > 0.0) m.emplace_back(steps[i].begin(), steps[i].end());
    int rank = 0;
    for (int col = 0; col < dim && rank < static_cast<int>(m.size()); ++col) {
      std::size_t piv = static_cast<std::size_t>(rank);
      for (std::size_t r = piv; r < m.size(); ++r)
        if (std::fabs(m[r][static_cast<std::size_t>(col)]) > std::fabs(m[piv][static_cast<std::size_t>(col)])) piv = r;
      if (std::fabs(m[piv][static_cast<std::size_t>(col)]) < 1e-12) continue;
      std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
      for (std::size_t r = 0; r < m.size(); ++r) {
        if (r == static_cast<std::size_t>(rank)) continue;
        const double f = m[r][static_cast<std::size_t>(col)] / m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)];
        for (int c = 0; c < dim; ++c) m[r][static_cast<std::size_t>(c)] -= f * m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
      }
      ++rank;
    }
    if (rank < dim) errs.push_back("walk support does not span Z^d");
  }
  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid walk:";
    for (const auto& e : errs) os << "\n  " << e;
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

int WalkSpec::max_l1() const {
  int m = 0;
  for (const auto& s : steps) {
    int n = 0;
    for (int x : s) n += std::abs(x);
    m = std::max(m, n);
  }
  return m;
}

std::vector<double> WalkSpec::covariance() const {
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> mean(d, 0.0), cov(d * d, 0.0);
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t a = 0; a < d; ++a) mean[a] += probs[i] * steps[i][a];
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cov[a * d + b] += probs[i] * (steps[i][a] - mean[a]) * (steps[i][b] - mean[b]);
  return cov;
}

GeographySpec GeographySpec::single_site() { return from_rows({{{0, 1.0}}}); }

GeographySpec GeographySpec::complete_graph(int sites) {
  if (sites < 1) throw Error(ErrorCode::ValidationError, "complete graph needs >= 1 site");
  if (sites == 1) return single_site();
  std::vector<std::vector<KernelEntry>> rows(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i)
    for (int j = 0; j < sites; ++j)
      if (i != j) rows[static_cast<std::size_t>(i)].push_back({j, 1.0 / (sites - 1)});
  return from_rows(std::move(rows));
}

GeographySpec GeographySpec::from_rows(std::vector<std::vector<KernelEntry>> rows) {
  GeographySpec g;
  const int n = static_cast<int>(rows.size());
  std::vector<std::string> errs;
  if (n < 1) errs.push_back("geography needs at least one site");
  for (int i = 0; i < n; ++i) {
    std::map<int, double> merged;
    for (const auto& e : rows[static_cast<std::size_t>(i)]) {
      if (e.to < 0 || e.to >= n) {
        errs.push_back("row " + std::to_string(i) + ": target " + std::to_string(e.to) + " out of range");
        continue;
      }
      if (!(e.p >= 0.0)) errs.push_back("row " + std::to_string(i) + ": negative probability");
      merged[e.to] += e.p;
    }
    std::vector<KernelEntry> row;
    for (auto [to, p] : merged)
      if (p > 0.0) row.push_back({to, p});
    g.rows_.push_back(std::move(row));
  }
  if (errs.empty()) {
    try {
      g.validate_rows();
    } catch (const Error& e) {
      errs.push_back(e.what());
    }
  }
  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid geography:";
    for (const auto& e : errs) os << "\n  " << e;
    throw Error(ErrorCode::ValidationError, os.str());
  }
  return g;
}

GeographySpec GeographySpec::from_dense(const std::vector<std::vector<double>>& matrix) {
  std::vector<std::vector<KernelEntry>> rows;
  for (const auto& r : matrix) {
    if (r.size() != matrix.size())
      throw Error(ErrorCode::ValidationError, "migration matrix must be square");
    std::vector<KernelEntry> row;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) row.push_back({static_cast<int>(j), r[j]});
    rows.push_back(std::move(row));
  }
  return from_rows(std::move(rows));
}

void GeographySpec::validate_rows() const {
  std::ostringstream os;
  bool bad = false;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    long double s = 0.0L;
    for (const auto& e : rows_[i]) s += e.p;
    if (std::fabs(static_cast<double>(s) - 1.0) > 1e-12) {
      os << (bad ? "\n" : "") << "row " << i << " sums to " << static_cast<double>(s) << ", expected 1";
      bad = true;
    }
  }
  if (bad) throw Error(ErrorCode::ValidationError, os.str());
}

double GeographySpec::p(int from, int to) const {
  for (const auto& e : row(from))
    if (e.to == to) return e.p;
  return 0.0;
}

double GeographySpec::self_probability(int site) const { return p(site, site); }

std::string GeographySpec::topology_name() const {
  if (topology_ == Topology::Torus)
    return "TORUS(N=" + std::to_string(torus_n_) + ",d=" + std::to_string(dim_) + ")";
  return "GENERIC_GRAPH";
}

std::vector<int> GeographySpec::coords(int site) const {
  if (topology_ != Topology::Torus) throw Error(ErrorCode::InvalidArgument, "coords need a torus");
  const int L = 2 * torus_n_ + 1;
  std::vector<int> c(static_cast<std::size_t>(dim_));
  for (int i = dim_ - 1; i >= 0; --i) {
    c[static_cast<std::size_t>(i)] = site % L - torus_n_;
    site /= L;
  }
  return c;
}

int GeographySpec::site_of(const std::vector<int>& c) const {
  if (topology_ != Topology::Torus) throw Error(ErrorCode::InvalidArgument, "site_of needs a torus");
  const int L = 2 * torus_n_ + 1;
  int idx = 0;
  for (int i = 0; i < dim_; ++i) {
    int x = ((c[static_cast<std::size_t>(i)] + torus_n_) % L + L) % L;
    idx = idx * L + x;
  }
  return idx;
}

double GeographySpec::torus_distance(int a, int b) const {
  const auto ca = coords(a), cb = coords(b);
  const int L = 2 * torus_n_ + 1;
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    int d = std::abs(ca[static_cast<std::size_t>(i)] - cb[static_cast<std::size_t>(i)]);
    d = std::min(d, L - d);
    s += static_cast<double>(d) * d;
  }
  return std::sqrt(s);
}

GeographySpec build_torus(int N, const WalkSpec& walk, long site_budget) {
  if (N < 1) throw Error(ErrorCode::ValidationError, "torus needs N >= 1");
  walk.validate();
  const long L = 2L * N + 1;
  long sites = 1;
  for (int i = 0; i < walk.dim; ++i) {
    if (sites > site_budget / L)
      throw Error(ErrorCode::SizeOverflow, "torus site count exceeds budget " + std::to_string(site_budget));
    sites *= L;
  }
  GeographySpec g;
  g.topology_ = Topology::Torus;
  g.torus_n_ = N;
  g.dim_ = walk.dim;
  g.walk_ = walk;
  g.rows_.resize(static_cast<std::size_t>(sites));
  std::vector<int> target(static_cast<std::size_t>(walk.dim));
  for (int s = 0; s < static_cast<int>(sites); ++s) {
    const auto c = g.coords(s);
    std::map<int, double> merged;
    for (std::size_t k = 0; k < walk.steps.size(); ++k) {
      if (walk.probs[k] == 0.0) continue;
      for (int i = 0; i < walk.dim; ++i)
        target[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + walk.steps[k][static_cast<std::size_t>(i)];
      merged[g.site_of(target)] += walk.probs[k];
    }
    auto& row = g.rows_[static_cast<std::size_t>(s)];
    for (auto [to, p] : merged) row.push_back({to, p});
  }
  g.validate_rows();
  return g;
}

double kappa(double G, double lambda22) {
  if (!(G > 0.0) || !(lambda22 > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa needs positive inputs");
  return 2.0 / (G + 2.0 / lambda22);
}

}  // namespace lcoal
