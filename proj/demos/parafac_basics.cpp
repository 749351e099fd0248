// PARAFAC model basics: entry evaluation, parameter counting, matricization
// round trip.

#include <cstdio>

#include "fhtlr/parafac.hpp"

using namespace fhtlr;

int main() {
  // rank-2 model of a 3 x 4 x 5 tensor
  ParafacModel model = ParafacModel::random({3, 4, 5}, 2, 0.5, /*seed=*/42);

  std::printf("dims: 3 x 4 x 5, rank 2\n");
  std::printf("dense entries: %zu, model parameters: %zu\n",
              joint_cardinality(model.dims()), count_params(model));
  std::printf("entry (1,2,3): %.6f\n", model.eval_entry({1, 2, 3}));

  const DenseTensor full = reconstruct(model);
  const Matrix unfolded = matricize(model, 1);
  const DenseTensor back = unmatricize(unfolded, 1, model.dims());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < full.data.size(); ++i) {
    const double d = std::abs(full.data[i] - back.data[i]);
    max_diff = d > max_diff ? d : max_diff;
  }
  std::printf("mode-1 unfolding is %d x %d; round-trip max diff: %.3g\n", unfolded.rows,
              unfolded.cols, max_diff);
  return 0;
}
