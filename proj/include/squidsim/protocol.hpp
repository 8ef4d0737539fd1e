#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "squidsim/actuation.hpp"

namespace squidsim {

// Seven-group telemetry payload. Angles in the order the IMU reports them:
// eul = (heading, roll, pitch), quat = (x, y, z, w).
struct TelemetryPacket {
  double lat = 0.0;
  double lon = 0.0;
  std::array<double, 3> acc{};
  std::array<double, 3> eul{};
  std::array<double, 3> gyr{};
  std::array<double, 4> quat{0.0, 0.0, 0.0, 1.0};
  std::array<double, 3> vel{};
  std::array<double, 3> dis{};

  // IEEE comparison, so -0.0 == 0.0.
  bool operator==(const TelemetryPacket&) const = default;
};

enum class ParseErrorKind {
  empty,
  missing_field,
  order,
  arity,
  bad_number,
  trailing_data,
  unknown_verb,
  id_range,
  bad_state,
  out_of_range,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, std::string field, const std::string& detail);

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }
  const std::string& field() const { return field_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
  std::string field_;
};

/// Fixed-point text with `decimals` digits, rounding half away from zero
/// and keeping the sign of the value (so -0.001 -> "-0.00").
std::string format_fixed(double value, int decimals);

/// Value the wire form of `value` decodes to.
double quantize(double value, int decimals);
TelemetryPacket quantize(const TelemetryPacket& p);

/// Throws std::invalid_argument if any field is non-finite.
std::string encode_telemetry(const TelemetryPacket& p);

/// Strict parse; throws ParseError naming the byte offset and field.
TelemetryPacket parse_telemetry(std::string_view payload);

struct SetpointCommand {
  enum class Axis { heading, depth };
  Axis axis = Axis::heading;
  double value = 0.0;

  bool operator==(const SetpointCommand&) const = default;
};

struct MissionCommand {
  enum class Action { start, abort };
  Action action = Action::start;

  bool operator==(const MissionCommand&) const = default;
};

using Command = std::variant<MotorCommand, SetpointCommand, MissionCommand>;

/// Command grammar:
///   M<id>:<forward|reverse|stop>[:<magnitude>]
///   HDG:<deg>   DEP:<m>   MISSION:<start|abort>
Command parse_command(std::string_view text);
std::string format_command(const Command& cmd);

// Bridge frames, newline excluded.
std::string make_tlm_frame(std::string_view payload, int rssi_dbm);
std::string make_err_frame(std::string_view message);

struct TlmFrame {
  std::string payload;
  int rssi_dbm = 0;
};

/// Splits `TLM <payload>|RSSI:<int>`; throws ParseError if malformed.
TlmFrame parse_tlm_frame(std::string_view frame);

}  // namespace squidsim
