#pragma once

#include <bitset>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace stackpeg {

using AsciiMask = std::bitset<128>;

/// A composable character class.
///
/// Membership for bytes below 128 is decided by the mask alone. Bytes at or
/// above 128 follow the high-byte policy: match nothing, match everything, or
/// defer to a caller-supplied membership function.
class CharPredicate {
public:
    enum class High { none, all, custom };
    using HighFn = std::function<bool(unsigned char)>;

    CharPredicate() = default;
    explicit CharPredicate(AsciiMask mask, High high = High::none, std::string name = {});

    static CharPredicate from_chars(std::string_view chars);
    static CharPredicate range(char lo, char hi);
    static CharPredicate with_high_fn(AsciiMask mask, HighFn fn, std::string name);

    bool contains(char c) const noexcept;

    const AsciiMask& ascii_mask() const noexcept { return mask_; }
    High high() const noexcept { return high_; }

    /// Display name used in error messages. Falls back to class notation.
    std::string name() const;
    /// Class notation, e.g. `[0-9]` or `[^+-]`.
    std::string notation() const;

    CharPredicate operator|(const CharPredicate& other) const;
    CharPredicate negated() const;
    CharPredicate named(std::string name) const;

    /// Structural equality: mask, high policy, and (for custom) the same function object.
    friend bool operator==(const CharPredicate& a, const CharPredicate& b) noexcept;

private:
    AsciiMask mask_;
    High high_ = High::none;
    std::shared_ptr<const HighFn> high_fn_;
    std::string name_;
};

/// Render a mask as bracketed class notation.
std::string mask_notation(const AsciiMask& mask, bool negated);

namespace predicates {

const CharPredicate& Digit();
const CharPredicate& Alpha();
const CharPredicate& LowerAlpha();
const CharPredicate& UpperAlpha();
const CharPredicate& AlphaNum();
const CharPredicate& HexDigit();
const CharPredicate& LowerHexLetter();
const CharPredicate& UpperHexLetter();
const CharPredicate& Visible();

/// Name of the predefined predicate with exactly this membership, or empty.
std::string canonical_name(const AsciiMask& mask, CharPredicate::High high);

} // namespace predicates

} // namespace stackpeg
