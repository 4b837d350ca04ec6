#include "aoisim/age.hpp"

#include <stdexcept>

namespace aoisim {

AgeState tick(const AgeState& age, const std::vector<SlotOutcome>& outcomes, int slot) {
  if (static_cast<int>(outcomes.size()) != age.devices())
    throw std::logic_error("tick: one outcome per device required");

  AgeState next = age;
  for (int k = 0; k < age.devices(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    switch (outcomes[uk]) {
      case SlotOutcome::HeldAtDevice:
        next.delta0[k] = age.delta0[k] + 1;
        break;
      case SlotOutcome::Uploaded:
        next.deltaM[k] = age.delta0[k] + 1;
        next.upload_slot[uk] = slot;
        break;
      case SlotOutcome::HeldAtUav:
        next.deltaM[k] = age.deltaM[k] + 1;
        break;
      case SlotOutcome::Forwarded:
        next.deltaB[k] = age.deltaM[k] + 1;
        next.forward_slot[uk] = slot;
        break;
      case SlotOutcome::HeldAtBs:
        next.deltaB[k] = age.deltaB[k] + 1;
        break;
      case SlotOutcome::Completed:
        next.finish_slot[uk] = slot;
        break;
      case SlotOutcome::UploadedDirect:
        next.deltaB[k] = age.delta0[k] + 1;
        next.upload_slot[uk] = slot;
        break;
      case SlotOutcome::Idle:
        break;
    }
  }
  return next;
}

AoiSummary mean_aoi(const std::vector<std::vector<AgeSample>>& history, double k1, double k2) {
  if (history.empty()) throw std::invalid_argument("mean_aoi: empty history");

  std::int64_t sum_m = 0, sum_b = 0, sum_first = 0;
  std::size_t n = 0;
  for (const auto& slot_samples : history) {
    for (const auto& s : slot_samples) {
      sum_m += s.delta_m_stored;
      sum_b += s.delta_b_stored;
      sum_first += s.first_hop_live;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("mean_aoi: history has no devices");

  AoiSummary out;
  const double dn = static_cast<double>(n);
  out.mean_delta_m = static_cast<double>(sum_m) / dn;
  out.mean_delta_b = static_cast<double>(sum_b) / dn;
  out.objective = k1 * static_cast<double>(sum_first) / dn + k2 * out.mean_delta_b;
  return out;
}

}  // namespace aoisim
