#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lcoal {

// Step distribution of a random walk on Z^d with finite support.
struct WalkSpec {
  int dim = 3;
  std::vector<std::vector<int>> steps;
  std::vector<double> probs;

  static WalkSpec simple(int d);
  // Throws VALIDATION_ERROR: probabilities sum to 1, steps have dimension d,
  // and the support spans Z^d.
  void validate() const;
  // Largest L1 norm of a step.
  int max_l1() const;
  // Step covariance matrix, row-major d x d.
  std::vector<double> covariance() const;
};

enum class Topology { GenericGraph, Torus };

struct KernelEntry {
  int to = 0;
  double p = 0.0;
};

class GeographySpec {
 public:
  static GeographySpec single_site();
  // Uniform jumps to the other sites.
  static GeographySpec complete_graph(int sites);
  // Rows of (target, probability); entries for the same target are merged.
  static GeographySpec from_rows(std::vector<std::vector<KernelEntry>> rows);
  static GeographySpec from_dense(const std::vector<std::vector<double>>& matrix);

  int sites() const { return static_cast<int>(rows_.size()); }
  const std::vector<KernelEntry>& row(int site) const { return rows_[static_cast<std::size_t>(site)]; }
  double p(int from, int to) const;
  double self_probability(int site) const;
  Topology topology() const { return topology_; }
  std::string topology_name() const;

  // Torus data (only for Topology::Torus).
  int torus_n() const { return torus_n_; }
  int dim() const { return dim_; }
  const WalkSpec& walk() const { return walk_; }
  std::vector<int> coords(int site) const;
  int site_of(const std::vector<int>& coords) const;  // wraps coordinates
  // Euclidean distance on the torus (per-coordinate wrap).
  double torus_distance(int a, int b) const;

  friend GeographySpec build_torus(int N, const WalkSpec& walk, long site_budget);

 private:
  void validate_rows() const;

  std::vector<std::vector<KernelEntry>> rows_;
  Topology topology_ = Topology::GenericGraph;
  int torus_n_ = 0;
  int dim_ = 0;
  WalkSpec walk_;
};

inline constexpr long kDefaultSiteBudget = 5'000'000;

// Torus [-N,N]^d with sites in lexicographic coordinate order and the base walk
// wrapped modulo the side length 2N+1. Throws SIZE_OVERFLOW past site_budget.
GeographySpec build_torus(int N, const WalkSpec& walk, long site_budget = kDefaultSiteBudget);

enum class GreenMethod { LatticeSum, MonteCarlo };
std::string to_string(GreenMethod m);

struct GreenOptions {
  GreenMethod method = GreenMethod::LatticeSum;
  int k_max = 0;                 // lattice sum: exact terms p_0(0)..p_{k_max}(0); 0 picks by dimension
  long max_cells = 30'000'000;   // lattice sum memory guard
  long replicas = 200'000;       // Monte Carlo walks
  long horizon = 1000;           // Monte Carlo steps per walk
  std::uint64_t seed = 1;
  int shards = 16;               // Monte Carlo RNG streams
};

struct GreenEstimate {
  double estimate = 0.0;
  double error = 0.0;  // error bound (about three standard errors for Monte Carlo)
  GreenMethod method = GreenMethod::LatticeSum;
  double head = 0.0;   // exactly summed / simulated part
  double tail = 0.0;   // extrapolated remainder
  double standard_error = 0.0;
  long budget = 0;     // k_max or replicas * horizon
};

// Expected number of visits to 0 of the walk started at 0. DIMENSION_TOO_LOW if d < 3.
GreenEstimate green_function(const WalkSpec& walk, const GreenOptions& options);

// Return probabilities p_n(0), n = 0..k_max, by exact convolution.
std::vector<double> return_probabilities(const WalkSpec& walk, int k_max, long max_cells = 30'000'000);

double kappa(double G, double lambda22);

}  // namespace lcoal
