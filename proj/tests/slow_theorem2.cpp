// slow_theorem2.cpp — opt-in: L(|phi_l><0,0|) = -i h_l |phi_l><0,0| at 9 levels per mode.

#include "lioueps/models.hpp"
#include "lioueps/spectral.hpp"
#include "lioueps/superop.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

using namespace lioueps;

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const int levels = 9;
  double worst = 0;
  for (double g : {0.05, 0.1, 0.126, 0.2}) {
    const auto m = example3(1, g, 1, 0.5, levels);
    const auto nhh = analyze_nhh(effective_hamiltonian(m));
    Vector vac = Vector::Zero(m.space().dim());
    vac(0) = 1;
    for (std::size_t l = 0; l < nhh.h.size(); ++l) {
      const Operator e = Operator::outer(m.space(), nhh.phi[l], vac);
      worst = std::max(worst, hs_norm(apply_liouvillian(m, e) + (kI * nhh.h[l]) * e));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = worst <= 1e-10;
  std::printf("[%s] C3-slow Theorem 2 at %d levels per mode (%.2f s): max residual %.3e (tolerance 1e-10)\n",
              pass ? "PASS" : "FAIL", levels, secs, worst);
  return pass ? 0 : 1;
}
