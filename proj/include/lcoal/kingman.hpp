#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcoal {

// Law of the block count of the unit-rate Kingman coalescent; probs[k] = P(#K = k).
struct BlockCountLaw {
  std::vector<double> probs;
  double error = 0.0;  // bound on the L1 error of probs
  int n0 = 0;          // start size (0 for the entrance law)
  std::string method;
  double cross_check_tv = -1.0;  // TV to the other method, -1 if not run
};

// Law at time t of the pure death chain started from n0 blocks (pairs merge at
// rate 1), by uniformization. All terms are positive so no cancellation occurs.
BlockCountLaw death_chain_law(int n0, double t);

// Alternating spectral series for the entrance law from infinitely many blocks,
// evaluated in long double. Throws TRUNCATION_UNSTABLE when the cancellation
// error exceeds tolerance.
BlockCountLaw entrance_law_series(double t, double tolerance = 1e-9, int truncation = 0);

enum class EntranceMethod { Series, SimulateFrom, DeathChain };
std::string to_string(EntranceMethod m);

struct EntranceOptions {
  EntranceMethod method = EntranceMethod::Series;
  int n0 = 0;              // 0: double from 10*ceil(2/t) until stable
  double stability = 1e-3; // TV change allowed when n0 doubles
  long replicas = 100'000; // SimulateFrom only
  std::uint64_t seed = 1;
  bool cross_check = true;
};

// Smallest tested n0 (doubling) whose death-chain law moves by less than
// `stability` in TV when n0 doubles.
int stable_start_size(double t, double stability, int n0 = 0);

BlockCountLaw kingman_entrance_reference(double t, const EntranceOptions& options = {});

// Joint law of (#K(t1), #K(t2)) for t1 < t2 from the entrance law,
// joint[i][j] = P(#K(t1) = i, #K(t2) = j).
std::vector<std::vector<double>> kingman_two_time_law(double t1, double t2, const EntranceOptions& options = {});

}  // namespace lcoal
