#include "ttms/context.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ttms/errors.hpp"

namespace ttms {

std::string to_string(ContextKind kind) {
    switch (kind) {
    case ContextKind::none: return "none";
    case ContextKind::failure: return "failure";
    case ContextKind::slack: return "slack";
    case ContextKind::mode_change: return "mode_change";
    }
    return "kind" + std::to_string(static_cast<unsigned>(kind));
}

ContextKind parse_context_kind(const std::string &name) {
    if (name == "none") return ContextKind::none;
    if (name == "failure") return ContextKind::failure;
    if (name == "slack") return ContextKind::slack;
    if (name == "mode_change") return ContextKind::mode_change;
    if (name.rfind("kind", 0) == 0) {
        const auto code = std::stoul(name.substr(4));
        if (code < 8) return static_cast<ContextKind>(code);
    }
    throw FormatError("unknown context kind '" + name + "'");
}

namespace {

ContextWord place(const char *field, unsigned long value, unsigned shift, unsigned bits) {
    if (value >= (1UL << bits)) throw FieldOverflowError(field, value, bits);
    return static_cast<ContextWord>(value) << shift;
}

unsigned long extract(ContextWord word, unsigned shift, unsigned bits) {
    return (word >> shift) & ((1UL << bits) - 1);
}

} // namespace

ContextWord encode_context_word(const ContextEvent &event) {
    using namespace context_layout;
    return place("kind", static_cast<unsigned long>(event.kind), kind_shift, kind_bits) |
           place("value", event.value, value_shift, value_bits) |
           place("affected_task", event.affected_task, task_shift, task_bits) |
           place("timestamp", event.timestamp, time_shift, time_bits) |
           place("hw_id", event.hw_id, hw_shift, hw_bits);
}

ContextEvent decode_context_word(ContextWord word) {
    using namespace context_layout;
    ContextEvent event;
    event.kind = static_cast<ContextKind>(extract(word, kind_shift, kind_bits));
    event.value = static_cast<std::uint8_t>(extract(word, value_shift, value_bits));
    event.affected_task = static_cast<std::uint16_t>(extract(word, task_shift, task_bits));
    event.timestamp = static_cast<std::uint16_t>(extract(word, time_shift, time_bits));
    event.hw_id = static_cast<std::uint8_t>(extract(word, hw_shift, hw_bits));
    return event;
}

double value_fraction(std::uint8_t value) { return static_cast<double>(value & 7U) / 8.0; }

double frequency_factor(std::uint8_t value) { return 1.0 - value_fraction(value); }

void write_word_be(std::ostream &out, ContextWord word) {
    const char bytes[4] = {static_cast<char>(word >> 24), static_cast<char>(word >> 16),
                           static_cast<char>(word >> 8), static_cast<char>(word)};
    out.write(bytes, 4);
}

ContextWord read_word_be(std::istream &in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char *>(bytes), 4)) throw FormatError("truncated context word");
    return (ContextWord{bytes[0]} << 24) | (ContextWord{bytes[1]} << 16) |
           (ContextWord{bytes[2]} << 8) | ContextWord{bytes[3]};
}

std::string to_hex(ContextWord word) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08x", word);
    return buf;
}

ContextWord parse_hex_word(const std::string &text) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos, 16);
    } catch (const std::logic_error &) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size() || text.front() == '-' || value > 0xffffffffULL)
        throw FormatError("bad context word '" + text + "'");
    return static_cast<ContextWord>(value);
}

void ContextModel::validate() const {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp)
            throw ModelError("context events are not time-ordered at index " + std::to_string(i));
    }
}

} // namespace ttms
