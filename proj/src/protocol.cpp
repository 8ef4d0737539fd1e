#include "squidsim/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "squidsim/angles.hpp"

namespace squidsim {

std::string_view to_string(ParseErrorKind kind)
{
  switch (kind) {
    case ParseErrorKind::empty: return "empty";
    case ParseErrorKind::missing_field: return "missing field";
    case ParseErrorKind::order: return "field order";
    case ParseErrorKind::arity: return "arity";
    case ParseErrorKind::bad_number: return "bad number";
    case ParseErrorKind::trailing_data: return "trailing data";
    case ParseErrorKind::unknown_verb: return "unknown verb";
    case ParseErrorKind::id_range: return "id range";
    case ParseErrorKind::bad_state: return "bad state";
    case ParseErrorKind::out_of_range: return "out of range";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, std::string field,
                       const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) +
                         (field.empty() ? std::string() : " (" + field + ")") +
                         (detail.empty() ? std::string() : ": " + detail)),
      kind_(kind),
      offset_(offset),
      field_(std::move(field))
{
}

namespace {

constexpr std::array<std::uint64_t, 7> kPow10 = {1, 10, 100, 1000, 10000, 100000, 1000000};

// Largest scaled magnitude that still maps one-to-one onto doubles.
constexpr double kMaxScaled = 9.0e15;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a `-?[0-9]+(\.[0-9]+)?` token at the start of `s`, or 0.
std::size_t lex_number(std::string_view s)
{
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  const std::size_t int_start = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == int_start) return 0;
  if (i < s.size() && s[i] == '.') {
    const std::size_t frac_start = ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i == frac_start) return 0;
  }
  return i;
}

double to_double(std::string_view token)
{
  double v = 0.0;
  std::from_chars(token.data(), token.data() + token.size(), v);
  return v;
}

}  // namespace

std::string format_fixed(double value, int decimals)
{
  if (decimals < 0 || decimals >= static_cast<int>(kPow10.size()))
    throw std::invalid_argument("unsupported decimal count");
  if (!std::isfinite(value)) throw std::invalid_argument("cannot encode non-finite value");

  const double scale = static_cast<double>(kPow10[static_cast<std::size_t>(decimals)]);
  const double scaled = std::floor(std::fabs(value) * scale + 0.5);
  if (scaled > kMaxScaled) throw std::invalid_argument("value too large for fixed-point encoding");

  const auto k = static_cast<std::uint64_t>(scaled);
  const std::uint64_t unit = kPow10[static_cast<std::size_t>(decimals)];
  std::string out;
  if (std::signbit(value)) out.push_back('-');
  out += std::to_string(k / unit);
  if (decimals > 0) {
    std::string frac = std::to_string(k % unit);
    out.push_back('.');
    out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    out += frac;
  }
  return out;
}

double quantize(double value, int decimals) { return to_double(format_fixed(value, decimals)); }

TelemetryPacket quantize(const TelemetryPacket& p)
{
  TelemetryPacket q = p;
  q.lat = quantize(p.lat, 6);
  q.lon = quantize(p.lon, 6);
  auto f2 = [](auto& arr) {
    for (auto& v : arr) v = quantize(v, 2);
  };
  f2(q.acc);
  f2(q.eul);
  f2(q.gyr);
  f2(q.quat);
  f2(q.vel);
  f2(q.dis);
  return q;
}

namespace {

template <std::size_t N>
void append_group(std::string& out, std::string_view tag, const std::array<double, N>& v)
{
  out.push_back('|');
  out += tag;
  out.push_back(':');
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out.push_back(',');
    out += format_fixed(v[i], 2);
  }
}

}  // namespace

std::string encode_telemetry(const TelemetryPacket& p)
{
  std::string out;
  out.reserve(160);
  out += "LAT:";
  out += format_fixed(p.lat, 6);
  out += ",LON:";
  out += format_fixed(p.lon, 6);
  append_group(out, "ACC", p.acc);
  append_group(out, "EUL", p.eul);
  append_group(out, "GYR", p.gyr);
  append_group(out, "Q", p.quat);
  append_group(out, "VEL", p.vel);
  append_group(out, "DIS", p.dis);
  return out;
}

namespace {

constexpr std::array<std::string_view, 8> kTags = {"LAT", "LON", "ACC", "EUL",
                                                   "GYR", "Q",   "VEL", "DIS"};

class PayloadReader {
 public:
  explicit PayloadReader(std::string_view s) : s_(s) {}

  bool at_end() const { return pos_ >= s_.size(); }
  std::size_t pos() const { return pos_; }

  void tag(std::string_view expected)
  {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    while (i < s_.size() && s_[i] >= 'A' && s_[i] <= 'Z') ++i;
    const std::string_view found = s_.substr(start, i - start);
    if (found.empty() || i >= s_.size() || s_[i] != ':') {
      throw ParseError(ParseErrorKind::missing_field, start, std::string(expected),
                       "expected '" + std::string(expected) + ":'");
    }
    if (found != expected) {
      const bool known = std::find(kTags.begin(), kTags.end(), found) != kTags.end();
      throw ParseError(known ? ParseErrorKind::order : ParseErrorKind::missing_field, start,
                       std::string(expected),
                       "found '" + std::string(found) + "' where '" + std::string(expected) +
                           "' belongs");
    }
    pos_ = i + 1;
  }

  double number(std::string_view field)
  {
    const std::size_t len = lex_number(s_.substr(pos_));
    if (len == 0) {
      throw ParseError(ParseErrorKind::bad_number, pos_, std::string(field), "expected a number");
    }
    const double v = to_double(s_.substr(pos_, len));
    pos_ += len;
    return v;
  }

  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  void expect(char c, std::string_view field)
  {
    if (!peek(c)) {
      if (at_end())
        throw ParseError(ParseErrorKind::missing_field, pos_, std::string(field),
                         "payload ends early");
      throw ParseError(ParseErrorKind::bad_number, pos_, std::string(field),
                       std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  template <std::size_t N>
  std::array<double, N> group(std::string_view field)
  {
    const std::size_t start = pos_;
    tag(field);
    std::array<double, N> out{};
    std::size_t count = 0;
    while (true) {
      const double v = number(field);
      if (count < N) out[count] = v;
      ++count;
      if (peek(',')) {
        ++pos_;
        continue;
      }
      break;
    }
    if (count != N) {
      throw ParseError(ParseErrorKind::arity, start, std::string(field),
                       "expected " + std::to_string(N) + " values, found " +
                           std::to_string(count));
    }
    if (!at_end() && !peek('|')) {
      throw ParseError(ParseErrorKind::bad_number, pos_, std::string(field),
                       "unexpected character");
    }
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

TelemetryPacket parse_telemetry(std::string_view payload)
{
  if (payload.empty()) throw ParseError(ParseErrorKind::empty, 0, "", "empty payload");
  PayloadReader rd(payload);
  TelemetryPacket p;

  rd.tag("LAT");
  p.lat = rd.number("LAT");
  rd.expect(',', "LON");
  rd.tag("LON");
  p.lon = rd.number("LON");

  rd.expect('|', "ACC");
  p.acc = rd.group<3>("ACC");
  rd.expect('|', "EUL");
  p.eul = rd.group<3>("EUL");
  rd.expect('|', "GYR");
  p.gyr = rd.group<3>("GYR");
  rd.expect('|', "Q");
  p.quat = rd.group<4>("Q");
  rd.expect('|', "VEL");
  p.vel = rd.group<3>("VEL");
  rd.expect('|', "DIS");
  p.dis = rd.group<3>("DIS");

  if (!rd.at_end()) throw ParseError(ParseErrorKind::trailing_data, rd.pos(), "DIS", "");
  return p;
}

namespace {

double parse_value(std::string_view token, std::size_t offset, const std::string& field)
{
  const std::size_t len = lex_number(token);
  if (len == 0 || len != token.size())
    throw ParseError(ParseErrorKind::bad_number, offset, field,
                     "'" + std::string(token) + "' is not a number");
  return to_double(token);
}

MotorAction parse_action(std::string_view token, std::size_t offset)
{
  if (token == "forward") return MotorAction::forward;
  if (token == "reverse") return MotorAction::reverse;
  if (token == "stop") return MotorAction::stop;
  throw ParseError(ParseErrorKind::bad_state, offset, "M",
                   "'" + std::string(token) + "' is not forward, reverse or stop");
}

}  // namespace

Command parse_command(std::string_view text)
{
  if (text.empty()) throw ParseError(ParseErrorKind::empty, 0, "", "empty command");

  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError(ParseErrorKind::unknown_verb, 0, "",
                     "'" + std::string(text) + "' has no ':'");
  const std::string_view verb = text.substr(0, colon);
  const std::string_view arg = text.substr(colon + 1);
  const std::size_t arg_at = colon + 1;

  if (verb == "HDG" || verb == "DEP") {
    const std::string field(verb);
    const double v = parse_value(arg, arg_at, field);
    SetpointCommand sp;
    if (verb == "HDG") {
      sp.axis = SetpointCommand::Axis::heading;
      sp.value = wrap_360(v);
    } else {
      sp.axis = SetpointCommand::Axis::depth;
      if (v < 0.0)
        throw ParseError(ParseErrorKind::out_of_range, arg_at, field, "depth must be >= 0");
      sp.value = v;
    }
    return sp;
  }

  if (verb == "MISSION") {
    if (arg == "start") return MissionCommand{MissionCommand::Action::start};
    if (arg == "abort") return MissionCommand{MissionCommand::Action::abort};
    throw ParseError(ParseErrorKind::bad_state, arg_at, "MISSION",
                     "'" + std::string(arg) + "' is not start or abort");
  }

  if (verb.size() >= 2 && verb[0] == 'M' &&
      std::all_of(verb.begin() + 1, verb.end(), is_digit)) {
    int id = 0;
    const auto [ptr, ec] = std::from_chars(verb.data() + 1, verb.data() + verb.size(), id);
    if (ec != std::errc() || id < 1 || id > kMotorCount)
      throw ParseError(ParseErrorKind::id_range, 1, "M",
                       "motor id '" + std::string(verb.substr(1)) + "' not in 1..6");

    MotorCommand cmd;
    cmd.motor_id = id;
    const std::size_t second = arg.find(':');
    cmd.action = parse_action(arg.substr(0, second), arg_at);
    if (second != std::string_view::npos) {
      const std::size_t mag_at = arg_at + second + 1;
      const double mag = parse_value(arg.substr(second + 1), mag_at, "M");
      if (mag < 0.0 || mag > 1.0)
        throw ParseError(ParseErrorKind::out_of_range, mag_at, "M", "magnitude must be in [0, 1]");
      cmd.magnitude = mag;
    }
    return cmd;
  }

  throw ParseError(ParseErrorKind::unknown_verb, 0, std::string(verb),
                   "unknown verb '" + std::string(verb) + "'");
}

std::string format_command(const Command& cmd)
{
  struct Visitor {
    std::string operator()(const MotorCommand& m) const
    {
      std::string s = "M" + std::to_string(m.motor_id) + ":" + std::string(to_string(m.action));
      if (m.magnitude != 1.0) s += ":" + format_fixed(m.magnitude, 2);
      return s;
    }
    std::string operator()(const SetpointCommand& sp) const
    {
      return (sp.axis == SetpointCommand::Axis::heading ? "HDG:" : "DEP:") +
             format_fixed(sp.value, 2);
    }
    std::string operator()(const MissionCommand& m) const
    {
      return m.action == MissionCommand::Action::start ? "MISSION:start" : "MISSION:abort";
    }
  };
  return std::visit(Visitor{}, cmd);
}

std::string make_tlm_frame(std::string_view payload, int rssi_dbm)
{
  std::string out = "TLM ";
  out += payload;
  out += "|RSSI:";
  out += std::to_string(rssi_dbm);
  return out;
}

std::string make_err_frame(std::string_view message)
{
  std::string out = "ERR ";
  out += message;
  return out;
}

TlmFrame parse_tlm_frame(std::string_view frame)
{
  constexpr std::string_view kPrefix = "TLM ";
  constexpr std::string_view kRssi = "|RSSI:";
  if (frame.substr(0, kPrefix.size()) != kPrefix)
    throw ParseError(ParseErrorKind::unknown_verb, 0, "TLM", "not a TLM frame");
  const std::size_t at = frame.rfind(kRssi);
  if (at == std::string_view::npos || at < kPrefix.size())
    throw ParseError(ParseErrorKind::missing_field, frame.size(), "RSSI", "");
  const std::string_view digits = frame.substr(at + kRssi.size());
  int rssi = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rssi);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
    throw ParseError(ParseErrorKind::bad_number, at + kRssi.size(), "RSSI", "");
  return {std::string(frame.substr(kPrefix.size(), at - kPrefix.size())), rssi};
}

}  // namespace squidsim
