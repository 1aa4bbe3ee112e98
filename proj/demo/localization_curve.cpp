// Marked-edge probability against step count, exact and large-N form side by
// side, plus the same walk with phase pi for contrast.
//
//   localization_curve [N] [K]      (defaults 400 2)
// Output is whitespace-separated columns, ready for gnuplot.

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "qwalk/reduced_model.hpp"

int main(int argc, char** argv) {
  using namespace qwalk;
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 400;
  const std::size_t k = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 2;

  const auto params = asymptotic_params(n, k);
  const auto init = reduced_initial_state(n, k);
  const auto half = spectral_decompose(reduced_operator(n, k, Phase::half_pi()));
  const auto flip = spectral_decompose(reduced_operator(n, k, Phase::pi()));

  std::printf("# N=%zu K=%zu x=%.6g n_opt=%zu\n", n, k, params.x, params.n_opt);
  std::printf("# step p_marked(pi/2) sin^2(2xn) p_marked(pi)\n");
  for (std::size_t s = 0; s <= 2 * params.n_opt; ++s) {
    const double ideal = std::sin(2.0 * params.x * static_cast<double>(s));
    std::printf("%zu %.10f %.10f %.10f\n", s,
                evolve_reduced(init, half, s).marked_weight(), ideal * ideal,
                evolve_reduced(init, flip, s).marked_weight());
  }
}
