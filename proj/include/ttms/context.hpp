#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ttms {

enum class ContextKind : std::uint8_t { none = 0, failure = 1, slack = 2, mode_change = 3 };

std::string to_string(ContextKind kind);
ContextKind parse_context_kind(const std::string &name);

/// A single failure, slack or mode-change event.
///
/// Field widths follow the 32-bit context word:
///   bits 29..31 kind, 26..28 value, 16..25 affected task, 6..15 timestamp, 0..5 hardware id.
struct ContextEvent {
    ContextKind kind = ContextKind::none;
    std::uint8_t value = 0;
    std::uint16_t affected_task = 0;
    std::uint16_t timestamp = 0;
    std::uint8_t hw_id = 0;

    bool operator==(const ContextEvent &) const = default;
};

using ContextWord = std::uint32_t;

namespace context_layout {
inline constexpr unsigned kind_shift = 29, kind_bits = 3;
inline constexpr unsigned value_shift = 26, value_bits = 3;
inline constexpr unsigned task_shift = 16, task_bits = 10;
inline constexpr unsigned time_shift = 6, time_bits = 10;
inline constexpr unsigned hw_shift = 0, hw_bits = 6;

constexpr ContextWord mask(unsigned shift, unsigned bits) {
    return static_cast<ContextWord>(((std::uint64_t{1} << bits) - 1) << shift);
}
} // namespace context_layout

/// Throws FieldOverflowError naming the first field that does not fit its width.
ContextWord encode_context_word(const ContextEvent &event);
ContextEvent decode_context_word(ContextWord word);

/// Fraction of slack (or power reduction) for a 3-bit value level: value / 8.
double value_fraction(std::uint8_t value);
/// Frequency scale factor for a mode-change level: 1 - value / 8.
double frequency_factor(std::uint8_t value);

void write_word_be(std::ostream &out, ContextWord word);
ContextWord read_word_be(std::istream &in);

std::string to_hex(ContextWord word);
ContextWord parse_hex_word(const std::string &text);

struct ContextModel {
    std::vector<ContextEvent> events;

    /// Throws ModelError when timestamps decrease.
    void validate() const;
};

} // namespace ttms
