#include "stackpeg/stack_effect.hpp"

#include <algorithm>

namespace stackpeg {

namespace {

std::string join_messages(const std::vector<EffectError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty())
            out += "; ";
        out += e.message;
    }
    return out;
}

std::optional<std::vector<Tag>> unify_lists(const std::vector<Tag>& a, const std::vector<Tag>& b) {
    if (a.size() != b.size())
        return std::nullopt;
    std::vector<Tag> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto t = unify(a[i], b[i]);
        if (!t)
            return std::nullopt;
        out.push_back(std::move(*t));
    }
    return out;
}

// Pushed tags meet across alternatives: equal tags stay, a wildcard on
// either side makes the result unknown.
std::optional<std::vector<Tag>> join_lists(const std::vector<Tag>& a, const std::vector<Tag>& b) {
    if (a.size() != b.size())
        return std::nullopt;
    std::vector<Tag> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_wildcard() || b[i].is_wildcard())
            out.push_back(Tag::wildcard());
        else if (a[i] == b[i])
            out.push_back(a[i]);
        else
            return std::nullopt;
    }
    return out;
}

bool all_conform(const std::vector<Tag>& found, const std::vector<Tag>& expected) {
    if (found.size() != expected.size())
        return false;
    for (std::size_t i = 0; i < found.size(); ++i)
        if (!conforms(found[i], expected[i]))
            return false;
    return true;
}

} // namespace

bool conforms(const Tag& found, const Tag& expected) { return expected.is_wildcard() || found == expected; }

bool conforms(const StackEffect& actual, const StackEffect& declared) {
    // The declaration promises callers its pops are present and its pushes
    // look as stated; the body may need less and give more.
    return all_conform(declared.pops, actual.pops) && all_conform(actual.pushes, declared.pushes);
}

std::string to_string(std::span<const Tag> tags) {
    std::string out = "[";
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i)
            out += ',';
        out += tags[i].name();
    }
    out += ']';
    return out;
}

std::string to_string(const StackEffect& e) { return to_string(e.pops) + " -> " + to_string(e.pushes); }

std::string_view to_string(EffectErrorKind k) {
    switch (k) {
    case EffectErrorKind::effect_mismatch: return "EffectMismatch";
    case EffectErrorKind::branch_effect_mismatch: return "BranchEffectMismatch";
    case EffectErrorKind::unsupported_repetition_effect: return "UnsupportedRepetitionEffect";
    case EffectErrorKind::start_rule_pops: return "StartRulePops";
    case EffectErrorKind::undeclared_recursive_rule: return "UndeclaredRecursiveRule";
    }
    return "?";
}

effect_error::effect_error(std::vector<EffectError> errors)
    : std::runtime_error(join_messages(errors)), errors_(std::move(errors)) {}

std::optional<StackEffect> unify(const StackEffect& a, const StackEffect& b) {
    auto pops = unify_lists(a.pops, b.pops);
    auto pushes = unify_lists(a.pushes, b.pushes);
    if (!pops || !pushes)
        return std::nullopt;
    return StackEffect{std::move(*pops), std::move(*pushes)};
}

StackEffect seq_compose(const StackEffect& lhs, const StackEffect& rhs) {
    const std::size_t provided = lhs.pushes.size();
    const std::size_t wanted = rhs.pops.size();
    const std::size_t k = std::min(provided, wanted);

    // Top-aligned overlap: the i-th value from the top on both sides.
    for (std::size_t i = 0; i < k; ++i) {
        const Tag& found = lhs.pushes[provided - 1 - i];
        const Tag& expected = rhs.pops[wanted - 1 - i];
        if (!conforms(found, expected)) {
            EffectError err{EffectErrorKind::effect_mismatch,
                            "stack effect mismatch at depth " + std::to_string(i) + ": expected " +
                                expected.name() + ", found " + found.name(),
                            {}, i, expected, found, 0};
            throw effect_error({std::move(err)});
        }
    }

    StackEffect out;
    if (provided >= wanted) {
        out.pops = lhs.pops;
        out.pushes.assign(lhs.pushes.begin(), lhs.pushes.end() - static_cast<std::ptrdiff_t>(k));
        out.pushes.insert(out.pushes.end(), rhs.pushes.begin(), rhs.pushes.end());
    } else {
        out.pops.assign(rhs.pops.begin(), rhs.pops.end() - static_cast<std::ptrdiff_t>(k));
        out.pops.insert(out.pops.end(), lhs.pops.begin(), lhs.pops.end());
        out.pushes = rhs.pushes;
    }
    return out;
}

StackEffect choice_compose(std::span<const StackEffect> effects) {
    if (effects.empty())
        return StackEffect::neutral();
    StackEffect acc = effects.front();
    for (std::size_t i = 1; i < effects.size(); ++i) {
        auto pops = unify_lists(acc.pops, effects[i].pops);
        auto pushes = join_lists(acc.pushes, effects[i].pushes);
        if (!pops || !pushes) {
            EffectError err{EffectErrorKind::branch_effect_mismatch,
                            "alternative " + std::to_string(i) + " has effect " + to_string(effects[i]) +
                                " but earlier alternatives have " + to_string(acc),
                            {}, 0, {}, {}, i};
            throw effect_error({std::move(err)});
        }
        acc = StackEffect{std::move(*pops), std::move(*pushes)};
    }
    return acc;
}

StackEffect repetition_effect(const StackEffect& inner, RepetitionKind kind) {
    if (inner.is_neutral())
        return inner;

    const auto& pops = inner.pops;
    const auto& pushes = inner.pushes;
    if (pushes.size() <= pops.size()) {
        auto suffix = std::vector<Tag>(pops.end() - static_cast<std::ptrdiff_t>(pushes.size()), pops.end());
        // Each iteration's pushes feed the next iteration's pops. With zero
        // iterations the incoming values stay, so only the suffix is known.
        if (all_conform(pushes, suffix)) {
            if (kind == RepetitionKind::one_or_more)
                return inner;
            return StackEffect{suffix, suffix};
        }
    }

    if (pops.empty() && pushes.size() == 1)
        return StackEffect{{}, {list_of(pushes.front())}};

    EffectError err{EffectErrorKind::unsupported_repetition_effect,
                    "repetition body effect " + to_string(inner) +
                        " is neither a reduction nor a single-value collection",
                    {}, 0, {}, {}, 0};
    throw effect_error({std::move(err)});
}

} // namespace stackpeg
