#include "hcsim/types.hpp"

#include <charconv>

namespace hcsim {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Read: return "R";
    case Op::Write: return "W";
    case Op::IFetch: return "I";
  }
  return "?";
}

std::optional<Source> Source::parse(std::string_view token) {
  SourceKind kind;
  if (token.starts_with("cpu")) {
    kind = SourceKind::Cpu;
  } else if (token.starts_with("gpu")) {
    kind = SourceKind::Gpu;
  } else {
    return std::nullopt;
  }
  std::string_view digits = token.substr(3);
  if (digits.empty()) return std::nullopt;
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value > 255) {
    return std::nullopt;
  }
  return Source{kind, static_cast<std::uint8_t>(value)};
}

std::string Source::name() const {
  return (kind == SourceKind::Cpu ? "cpu" : "gpu") + std::to_string(index);
}

}  // namespace hcsim
