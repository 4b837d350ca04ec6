#pragma once

#include <cstdint>
#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

// What happened to a device's task during one slot, as seen by the age
// recursions. Exactly one outcome per device per slot.
enum class SlotOutcome : std::uint8_t {
  HeldAtDevice,    // task waiting at the device, not uploaded
  Uploaded,        // moved device -> UAV this slot
  HeldAtUav,       // at a UAV (processed or not), not forwarded
  Forwarded,       // moved UAV -> BS this slot
  HeldAtBs,        // at the BS, not yet executed
  Completed,       // BS finished the residual share this slot
  UploadedDirect,  // moved device -> BS this slot (no-UAV variant)
  Idle,            // no live task this slot (fresh task not yet active)
};

// Per-device age counters for the three hops, in whole slots. Exactly one
// counter is live per in-flight task; the other two hold their last values
// (a completed delivery leaves its final age in delta_b until the next one).
struct AgeState {
  AgeVec delta0;  // device-side age
  AgeVec deltaM;  // UAV-side age
  AgeVec deltaB;  // BS-side age
  // event slots of the device's current task, -1 when the event has not happened
  std::vector<int> upload_slot;
  std::vector<int> forward_slot;
  std::vector<int> finish_slot;

  AgeState() = default;
  explicit AgeState(int K)
      : delta0(AgeVec::Zero(K)),
        deltaM(AgeVec::Zero(K)),
        deltaB(AgeVec::Zero(K)),
        upload_slot(static_cast<std::size_t>(K), -1),
        forward_slot(static_cast<std::size_t>(K), -1),
        finish_slot(static_cast<std::size_t>(K), -1) {}

  int devices() const { return static_cast<int>(delta0.size()); }

  // restart the device-side counter for a freshly generated task
  void reset_device(int k) {
    delta0[k] = 0;
    upload_slot[static_cast<std::size_t>(k)] = -1;
    forward_slot[static_cast<std::size_t>(k)] = -1;
    finish_slot[static_cast<std::size_t>(k)] = -1;
  }
};

// Advances all counters by one slot given each device's outcome. The update
// order per device:
//   held at device:  delta0 += 1
//   uploaded:        deltaM  = delta0 + 1            (then delta0 freezes)
//   held at UAV:     deltaM += 1
//   forwarded:       deltaB  = deltaM + 1            (then deltaM freezes)
//   held at BS:      deltaB += 1
//   completed:       all freeze; finish_slot records `slot`
// `slot` is the slot the outcomes belong to; the returned state carries the
// ages entering slot+1.
AgeState tick(const AgeState& age, const std::vector<SlotOutcome>& outcomes, int slot);

struct AoiSummary {
  double mean_delta_m = 0.0;
  double mean_delta_b = 0.0;
  double objective = 0.0;  // k1 * mean(first-hop live age) + k2 * mean(deltaB)
};

// Row of the per-slot age history used for episode averages: the stored
// counters plus the live first-hop age (delta0 while the task waits at the
// device, deltaM while it sits at a UAV, 0 once it has left the first hop).
struct AgeSample {
  std::int64_t delta_m_stored = 0;
  std::int64_t delta_b_stored = 0;
  std::int64_t first_hop_live = 0;
};

// Episode averages over a (slot-major) history of K samples per slot.
AoiSummary mean_aoi(const std::vector<std::vector<AgeSample>>& history, double k1, double k2);

}  // namespace aoisim
