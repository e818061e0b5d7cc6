#pragma once

// Line-delimited session protocol. Each line is one JSON object.
//
// Inbound:
//   {"kind":"engage","tick":0,"p":[x,y,z],"q":[w,x,y,z]}
//   {"kind":"pose","tick":1,"p":[...],"q":[...],"dt":0.01}
//   {"kind":"disengage","tick":7}                       p and q optional
//   {"kind":"config","mapping":"rate","gain_t":"deadband:0.01","gain_r":"1",
//    "ego_t":true,"ego_r":false}                        every field optional
//
// Outbound:
//   {"kind":"object","tick":1,"p":[...],"q":[...],"k_t":1,"k_r":1,
//    "compliant_t":true,"compliant_r":true}
//   {"kind":"ack","of":"engage","tick":0,"engaged":true,"p":[...],"q":[...]}
//   {"kind":"error","tick":3,"message":"..."}
//
// A pose while engaged yields exactly one object frame with the same tick.
// A pose while disengaged is acknowledged and moves nothing. A config message
// disengages, swaps the mapping, and re-engages at the last device pose, so
// the object does not jump. Errors never close the session.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manip/mapping.hpp"
#include "manip/trace.hpp"

namespace manip {

class ProtocolSession {
 public:
  explicit ProtocolSession(const MappingConfig& config, const Pose& object = {}, double tol = 1e-9);

  /// Handles one inbound line and returns the outbound lines (without '\n').
  std::vector<std::string> handle(std::string_view line);

  const Pose& object() const noexcept;
  bool engaged() const noexcept;
  const MappingConfig& config() const noexcept { return config_; }

 private:
  MappingConfig config_;
  Pose object_;
  double tol_;
  std::optional<Session> session_;
  std::optional<Pose> last_device_;
  std::optional<std::int64_t> last_tick_;
};

/// The message sequence equivalent to replaying `trace`: an engage on every
/// sample that turns the flag on, a pose on every other sample, and a
/// disengage on every sample that turns it off.
std::vector<std::string> trace_to_messages(const Trace& trace);

/// Collects the object pose reported at every engaged tick (engage acks and
/// object frames) into the ReplayResult layout, so that serialize_object_trace
/// applies. Metrics are left empty.
ReplayResult collect_object_frames(const std::vector<std::string>& outbound);

}  // namespace manip
