#pragma once

#include "vfc/model.hpp"

namespace vfc {

// Branch-and-bound over the declared integer variables. Best-bound node
// selection with FIFO tie-break; branches on the most fractional variable,
// ties by lowest variable id. Proven optimal within opt.mip_abs_gap.
Solution solve_milp(const ModelInstance& model, const SolveOptions& opt = {});

// Dispatch: solve_milp when the model declares integers, else solve_lp.
Solution solve_model(const ModelInstance& model, const SolveOptions& opt = {});

}  // namespace vfc
