// Small tour of the library: exact counts, the asymptotic scale, psi on the
// lattice, and a Monte Carlo estimate of the return probability.

#include <cstdio>

#include "phad/charfn.hpp"
#include "phad/counting.hpp"
#include "phad/integration.hpp"
#include "phad/lattice.hpp"

int main() {
  for (int n = 2; n <= 4; ++n) {
    const phad::BigCount N = phad::count_dp(n, 8);
    const auto a = phad::asymptotic_scale(n, 2);
    std::printf("N_{%d,8} = %s   A = %.4g   N/A = %.4f   1 - C(n,3)/16 = %.4f\n", n, N.str().c_str(), a.A(),
                std::exp(phad::log_e(N) - a.log_A), a.predicted_ratio);
  }

  const auto lat = phad::psi_on_lattice(4);
  std::printf("n=4: |Lambda| = %llu, psi = 1,i,-1,-i with counts %llu %llu %llu %llu\n",
              static_cast<unsigned long long>(lat.lattice_size),
              static_cast<unsigned long long>(lat.root_counts[0]), static_cast<unsigned long long>(lat.root_counts[1]),
              static_cast<unsigned long long>(lat.root_counts[2]), static_cast<unsigned long long>(lat.root_counts[3]));

  const auto est = phad::integral_uniform_mc(3, 1, 200000, 42);
  std::printf("P(S_4 = 0) at n=3: %.5f +- %.5f (exact 384/4096 = %.5f)\n", est.value, est.std_error, 384.0 / 4096);
  return 0;
}
