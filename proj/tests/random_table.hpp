#pragma once

#include "faircert/fairness.hpp"
#include "faircert/prg.hpp"

namespace faircert::testing {

/// Count table with every cell nonempty. Errors of true label y are spread over the other labels.
inline GroupRiskTable random_table(CounterPrg& prg, std::uint32_t groups, std::uint32_t labels, bool round_sizes) {
  static constexpr std::uint64_t kRound[] = {100, 125, 200, 250, 400, 500, 1000, 2000, 5000, 10000};
  GroupRiskTable t(groups, labels);
  for (GroupId g = 0; g < groups; ++g) {
    const std::uint64_t scale = std::uint64_t{1} << prg.below(26);
    for (LabelId y = 0; y < labels; ++y) {
      const std::size_t c = t.cell(g, y);
      const std::uint64_t m = round_sizes ? kRound[prg.below(std::size(kRound))] : 1 + prg.below(scale);
      const std::uint64_t e = prg.below(m + 1);
      t.m_gy[c] = m;
      t.err_gy[c] = e;
      t.m_g[g] += m;
      t.err_g[g] += e;
      t.pred_gy[c] += m - e;
      std::uint64_t left = e;
      for (LabelId k = 1; k < labels && left > 0; ++k) {
        const std::uint64_t part = k + 1 == labels ? left : prg.below(left + 1);
        t.pred_gy[t.cell(g, (y + k) % labels)] += part;
        left -= part;
      }
    }
  }
  return t;
}

}  // namespace faircert::testing
