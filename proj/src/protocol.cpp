#include "manip/protocol.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "manip/compliance.hpp"
#include "manip/config.hpp"
#include "manip/errors.hpp"

namespace manip {

namespace {

using json = nlohmann::json;

// Same normalization tolerance as the trace reader.
constexpr double kQuatNormTolerance = 1e-6;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json quat_json(const UnitQuat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ProtocolError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ProtocolError(std::string(what) + " must be finite");
  return v;
}

Vec3 read_vec(const json& msg) {
  const auto it = msg.find("p");
  if (it == msg.end() || !it->is_array() || it->size() != 3) throw ProtocolError("p must be an array of 3 numbers");
  return {number((*it)[0], "p[0]"), number((*it)[1], "p[1]"), number((*it)[2], "p[2]")};
}

UnitQuat read_quat(const json& msg) {
  const auto it = msg.find("q");
  if (it == msg.end() || !it->is_array() || it->size() != 4) throw ProtocolError("q must be an array of 4 numbers");
  const double w = number((*it)[0], "q[0]");
  const double x = number((*it)[1], "q[1]");
  const double y = number((*it)[2], "q[2]");
  const double z = number((*it)[3], "q[3]");
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (std::abs(n - 1.0) > kQuatNormTolerance) {
    throw ProtocolError("q has norm " + format_real(n) + ", expected 1");
  }
  return UnitQuat::from_components(w, x, y, z);
}

std::int64_t read_tick(const json& msg) {
  const auto it = msg.find("tick");
  if (it == msg.end() || !it->is_number_integer()) throw ProtocolError("tick must be an integer");
  return it->get<std::int64_t>();
}

std::string text_field(const json& msg, const char* key) {
  const auto& v = msg.at(key);
  if (!v.is_string()) throw ProtocolError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

bool bool_field(const json& msg, const char* key) {
  const auto& v = msg.at(key);
  if (!v.is_boolean()) throw ProtocolError(std::string(key) + " must be true or false");
  return v.get<bool>();
}

std::string error_line(std::optional<std::int64_t> tick, const std::string& message) {
  json out = {{"kind", "error"}};
  if (tick) out["tick"] = *tick;
  out["message"] = message;
  return out.dump();
}

}  // namespace

ProtocolSession::ProtocolSession(const MappingConfig& config, const Pose& object, double tol)
    : config_(config), object_(object), tol_(tol) {
  validate(config_);
}

const Pose& ProtocolSession::object() const noexcept { return session_ ? session_->object() : object_; }

bool ProtocolSession::engaged() const noexcept { return session_ && session_->engaged(); }

std::vector<std::string> ProtocolSession::handle(std::string_view line) {
  std::optional<std::int64_t> tick;
  try {
    const json msg = json::parse(line.begin(), line.end());
    if (!msg.is_object()) throw ProtocolError("message must be a JSON object");
    const auto kind_it = msg.find("kind");
    if (kind_it == msg.end() || !kind_it->is_string()) throw ProtocolError("message needs a string \"kind\"");
    const std::string kind = kind_it->get<std::string>();

    if (kind == "config") {
      MappingConfig next = config_;
      if (msg.contains("mapping")) next.kind = parse_mapping_kind(text_field(msg, "mapping"));
      if (msg.contains("gain_t")) next.translation.law = parse_gain_spec(text_field(msg, "gain_t"));
      if (msg.contains("gain_r")) next.rotation.law = parse_gain_spec(text_field(msg, "gain_r"));
      if (msg.contains("ego_t")) next.translation.egocentric = bool_field(msg, "ego_t");
      if (msg.contains("ego_r")) next.rotation.egocentric = bool_field(msg, "ego_r");
      validate(next);
      config_ = next;
      const bool was_engaged = engaged();
      if (session_) {
        if (was_engaged) session_->disengage();
        session_->reconfigure(config_);
        if (was_engaged) session_->reengage(*last_device_, *last_tick_);
      }
      json ack = {{"kind", "ack"}, {"of", "config"}, {"engaged", was_engaged}, {"mapping", describe(config_)}};
      if (last_tick_) ack["tick"] = *last_tick_;
      return {ack.dump()};
    }

    tick = read_tick(msg);

    if (kind == "engage") {
      if (engaged()) throw ProtocolError("already engaged");
      const Pose device{read_vec(msg), read_quat(msg)};
      if (session_) {
        session_->reengage(device, *tick);
      } else {
        session_ = Session::engage(config_, device, object_, *tick);
      }
      last_device_ = device;
      last_tick_ = tick;
      const Pose& obj = session_->object();
      return {json{{"kind", "ack"},
                   {"of", "engage"},
                   {"tick", *tick},
                   {"engaged", true},
                   {"p", vec_json(obj.p)},
                   {"q", quat_json(obj.q)}}
                  .dump()};
    }

    if (kind == "disengage") {
      if (!engaged()) throw ProtocolError("not engaged");
      if (msg.contains("p") || msg.contains("q")) last_device_ = Pose{read_vec(msg), read_quat(msg)};
      session_->disengage();
      last_tick_ = tick;
      const Pose& obj = session_->object();
      return {json{{"kind", "ack"},
                   {"of", "disengage"},
                   {"tick", *tick},
                   {"engaged", false},
                   {"p", vec_json(obj.p)},
                   {"q", quat_json(obj.q)}}
                  .dump()};
    }

    if (kind == "pose") {
      const Pose device{read_vec(msg), read_quat(msg)};
      double dt = 1.0;
      if (msg.contains("dt")) dt = number(msg.at("dt"), "dt");
      if (!engaged()) {
        last_device_ = device;
        last_tick_ = tick;
        return {json{{"kind", "ack"}, {"of", "pose"}, {"tick", *tick}, {"engaged", false}}.dump()};
      }
      const Pose device_prev = *last_device_;
      const Pose object_prev = session_->object();
      const StepResult r = session_->step({*tick, device, dt, true});
      last_device_ = device;
      last_tick_ = tick;
      const StepVerdict v = step_verdict(device_prev, device, object_prev, r.object, tol_, *tick);
      return {json{{"kind", "object"},
                   {"tick", *tick},
                   {"p", vec_json(r.object.p)},
                   {"q", quat_json(r.object.q)},
                   {"k_t", r.k_t},
                   {"k_r", r.k_r},
                   {"compliant_t", v.translation_compliant},
                   {"compliant_r", v.rotation_compliant}}
                  .dump()};
    }

    throw ProtocolError("unknown message kind '" + kind + "'");
  } catch (const json::exception& e) {
    return {error_line(tick, std::string("malformed message: ") + e.what())};
  } catch (const std::exception& e) {
    return {error_line(tick, e.what())};
  }
}

std::vector<std::string> trace_to_messages(const Trace& trace) {
  std::vector<std::string> out;
  bool engaged = false;
  for (const auto& s : trace.samples) {
    json msg;
    if (s.engaged && !engaged) {
      msg = {{"kind", "engage"}, {"tick", s.t}};
    } else if (!s.engaged && engaged) {
      msg = {{"kind", "disengage"}, {"tick", s.t}};
    } else {
      msg = {{"kind", "pose"}, {"tick", s.t}};
    }
    msg["p"] = vec_json(s.pose.p);
    msg["q"] = quat_json(s.pose.q);
    if (msg["kind"] == "pose") msg["dt"] = s.dt;
    out.push_back(msg.dump());
    engaged = s.engaged;
  }
  return out;
}

ReplayResult collect_object_frames(const std::vector<std::string>& outbound) {
  ReplayResult result;
  for (const auto& line : outbound) {
    const json msg = json::parse(line);
    const std::string kind = msg.at("kind").get<std::string>();
    const bool engage_ack = kind == "ack" && msg.value("of", "") == "engage";
    if (kind != "object" && !engage_ack) continue;
    const auto& p = msg.at("p");
    const auto& q = msg.at("q");
    ObjectSample s;
    s.t = msg.at("tick").get<std::int64_t>();
    s.pose = {{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()},
              UnitQuat::from_components(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                        q[3].get<double>())};
    if (kind == "object") {
      s.k_t = msg.at("k_t").get<double>();
      s.k_r = msg.at("k_r").get<double>();
    }
    result.object_trace.push_back(s);
  }
  return result;
}

}  // namespace manip
