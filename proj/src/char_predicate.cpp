#include "stackpeg/char_predicate.hpp"

#include <array>
#include <utility>

namespace stackpeg {

namespace {

AsciiMask mask_range(char lo, char hi) {
    AsciiMask m;
    for (int c = static_cast<unsigned char>(lo); c <= static_cast<unsigned char>(hi) && c < 128; ++c)
        m.set(static_cast<std::size_t>(c));
    return m;
}

std::string class_char(unsigned c) {
    switch (c) {
    case '\n': return "\\n";
    case '\t': return "\\t";
    case '\r': return "\\r";
    case '\\': return "\\\\";
    case ']': return "\\]";
    case '[': return "\\[";
    case '-': return "\\-";
    case '^': return "\\^";
    default: break;
    }
    if (c < 32 || c == 127) {
        static constexpr char hex[] = "0123456789abcdef";
        return std::string{"\\x"} + hex[c >> 4] + hex[c & 15];
    }
    return std::string(1, static_cast<char>(c));
}

} // namespace

CharPredicate::CharPredicate(AsciiMask mask, High high, std::string name)
    : mask_(mask), high_(high), name_(std::move(name)) {}

CharPredicate CharPredicate::from_chars(std::string_view chars) {
    AsciiMask m;
    bool any_high = false;
    for (char c : chars) {
        auto u = static_cast<unsigned char>(c);
        if (u < 128)
            m.set(u);
        else
            any_high = true;
    }
    if (!any_high)
        return CharPredicate(m);
    std::string highs;
    for (char c : chars)
        if (static_cast<unsigned char>(c) >= 128)
            highs.push_back(c);
    return with_high_fn(m, [highs](unsigned char u) { return highs.find(static_cast<char>(u)) != std::string::npos; }, {});
}

CharPredicate CharPredicate::range(char lo, char hi) { return CharPredicate(mask_range(lo, hi)); }

CharPredicate CharPredicate::with_high_fn(AsciiMask mask, HighFn fn, std::string name) {
    CharPredicate p(mask, High::custom, std::move(name));
    p.high_fn_ = std::make_shared<const HighFn>(std::move(fn));
    return p;
}

bool CharPredicate::contains(char c) const noexcept {
    auto u = static_cast<unsigned char>(c);
    if (u < 128)
        return mask_.test(u);
    switch (high_) {
    case High::none: return false;
    case High::all: return true;
    case High::custom: return (*high_fn_)(u);
    }
    return false;
}

std::string CharPredicate::name() const {
    if (!name_.empty())
        return name_;
    auto canon = predicates::canonical_name(mask_, high_);
    return canon.empty() ? notation() : canon;
}

std::string CharPredicate::notation() const {
    if (high_ == High::all)
        return mask_notation(~mask_, true);
    return mask_notation(mask_, false);
}

CharPredicate CharPredicate::operator|(const CharPredicate& other) const {
    AsciiMask m = mask_ | other.mask_;
    if (high_ == High::all || other.high_ == High::all)
        return CharPredicate(m, High::all);
    if (high_ == High::none && other.high_ == High::none)
        return CharPredicate(m);
    auto lhs = *this;
    auto rhs = other;
    return with_high_fn(m, [lhs, rhs](unsigned char u) {
        return lhs.contains(static_cast<char>(u)) || rhs.contains(static_cast<char>(u));
    }, {});
}

CharPredicate CharPredicate::negated() const {
    switch (high_) {
    case High::none: return CharPredicate(~mask_, High::all);
    case High::all: return CharPredicate(~mask_, High::none);
    case High::custom: {
        auto fn = high_fn_;
        return with_high_fn(~mask_, [fn](unsigned char u) { return !(*fn)(u); }, {});
    }
    }
    return {};
}

CharPredicate CharPredicate::named(std::string name) const {
    CharPredicate p = *this;
    p.name_ = std::move(name);
    return p;
}

bool operator==(const CharPredicate& a, const CharPredicate& b) noexcept {
    return a.mask_ == b.mask_ && a.high_ == b.high_ && a.high_fn_ == b.high_fn_;
}

std::string mask_notation(const AsciiMask& mask, bool negated) {
    std::string out = negated ? "[^" : "[";
    unsigned c = 0;
    while (c < 128) {
        if (!mask.test(c)) {
            ++c;
            continue;
        }
        unsigned end = c;
        while (end + 1 < 128 && mask.test(end + 1))
            ++end;
        out += class_char(c);
        if (end >= c + 2) {
            out += '-';
            out += class_char(end);
        } else if (end == c + 1) {
            out += class_char(end);
        }
        c = end + 1;
    }
    out += ']';
    return out;
}

namespace predicates {

const CharPredicate& Digit() {
    static const CharPredicate p(mask_range('0', '9'), CharPredicate::High::none, "Digit");
    return p;
}
const CharPredicate& LowerAlpha() {
    static const CharPredicate p(mask_range('a', 'z'), CharPredicate::High::none, "LowerAlpha");
    return p;
}
const CharPredicate& UpperAlpha() {
    static const CharPredicate p(mask_range('A', 'Z'), CharPredicate::High::none, "UpperAlpha");
    return p;
}
const CharPredicate& Alpha() {
    static const CharPredicate p(mask_range('a', 'z') | mask_range('A', 'Z'), CharPredicate::High::none, "Alpha");
    return p;
}
const CharPredicate& AlphaNum() {
    static const CharPredicate p(Alpha().ascii_mask() | Digit().ascii_mask(), CharPredicate::High::none, "AlphaNum");
    return p;
}
const CharPredicate& LowerHexLetter() {
    static const CharPredicate p(mask_range('a', 'f'), CharPredicate::High::none, "LowerHexLetter");
    return p;
}
const CharPredicate& UpperHexLetter() {
    static const CharPredicate p(mask_range('A', 'F'), CharPredicate::High::none, "UpperHexLetter");
    return p;
}
const CharPredicate& HexDigit() {
    static const CharPredicate p(Digit().ascii_mask() | mask_range('a', 'f') | mask_range('A', 'F'),
                                 CharPredicate::High::none, "HexDigit");
    return p;
}
const CharPredicate& Visible() {
    static const CharPredicate p(mask_range('!', '~'), CharPredicate::High::none, "Visible");
    return p;
}

std::string canonical_name(const AsciiMask& mask, CharPredicate::High high) {
    if (high != CharPredicate::High::none)
        return {};
    static const std::array<const CharPredicate*, 9> known = {
        &Digit(), &Alpha(), &LowerAlpha(), &UpperAlpha(), &AlphaNum(),
        &HexDigit(), &LowerHexLetter(), &UpperHexLetter(), &Visible(),
    };
    for (const auto* p : known)
        if (p->ascii_mask() == mask)
            return p->name();
    return {};
}

} // namespace predicates

} // namespace stackpeg
