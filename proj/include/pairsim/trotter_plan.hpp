#pragma once

namespace pairsim {

enum class TrotterOrder { First, Wbl3 };

/// One simulated time step t0 split into k inner repetitions.
struct TrotterPlan {
  double t0 = 0.0;  // s
  int k = 1;
  TrotterOrder order = TrotterOrder::Wbl3;

  void validate() const;
};

}  // namespace pairsim
