#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace nullcore {

// Interned name. Equal names share one id for the lifetime of the process;
// the table is append-only, so a Symbol stays valid once created.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);
  static Symbol from_id(std::uint32_t id) noexcept {
    Symbol s;
    s.id_ = id;
    return s;
  }

  std::string_view str() const;
  std::uint32_t id() const noexcept { return id_; }

  auto operator<=>(const Symbol&) const = default;

 private:
  std::uint32_t id_ = 0;
};

}  // namespace nullcore

template <>
struct std::hash<nullcore::Symbol> {
  std::size_t operator()(const nullcore::Symbol& s) const noexcept { return s.id(); }
};
