#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <typeindex>
#include <variant>
#include <vector>

namespace stackpeg {

/// Symbolic type tag of a stack value. The tag `*` is the wildcard.
class Tag {
public:
    Tag() = default;
    explicit Tag(std::string name) : name_(std::move(name)) {}

    static Tag wildcard() { return Tag("*"); }

    const std::string& name() const noexcept { return name_; }
    bool is_wildcard() const noexcept { return name_ == "*"; }

    friend bool operator==(const Tag&, const Tag&) = default;
    friend auto operator<=>(const Tag&, const Tag&) = default;

private:
    std::string name_;
};

namespace tags {
inline const Tag Str{"Str"};
inline const Tag Node{"Node"};
inline const Tag Val{"Val"};
} // namespace tags

Tag list_of(const Tag& element);

/// Syntactic unification: the wildcard matches anything, concrete tags must be
/// equal. Returns the more specific of the two on success.
std::optional<Tag> unify(const Tag& a, const Tag& b);

/// A tagged value on the value stack: text, a labelled node, or an opaque host object.
class Value {
public:
    struct NodeData {
        std::string label;
        std::vector<Value> children;

        NodeData(std::string l, std::vector<Value> c) : label(std::move(l)), children(std::move(c)) {}
        NodeData(const NodeData&) = default;
        NodeData& operator=(const NodeData&) = default;
        // Deep left-leaning trees (long reductions) must not recurse on teardown.
        ~NodeData();
    };

    struct Opaque {
        std::shared_ptr<const void> ptr;
        std::type_index type = typeid(void);
    };

    Value() = default;

    static Value text(Tag tag, std::string s);
    static Value node(Tag tag, std::string label, std::vector<Value> children);

    template <class T>
    static Value opaque(Tag tag, std::shared_ptr<const T> obj) {
        Value v;
        v.tag_ = std::move(tag);
        v.payload_ = Opaque{std::static_pointer_cast<const void>(std::move(obj)), typeid(T)};
        return v;
    }

    const Tag& tag() const noexcept { return tag_; }

    bool is_text() const noexcept { return std::holds_alternative<std::string>(payload_); }
    bool is_node() const noexcept { return std::holds_alternative<NodePtr>(payload_); }
    bool is_opaque() const noexcept { return std::holds_alternative<Opaque>(payload_); }

    const std::string& as_text() const;
    const NodeData& as_node() const;

    template <class T>
    std::shared_ptr<const T> as_opaque() const {
        const auto* o = std::get_if<Opaque>(&payload_);
        if (!o || o->type != typeid(T))
            throw std::bad_variant_access();
        return std::static_pointer_cast<const T>(o->ptr);
    }

    /// Deep structural equality. Opaque payloads compare by identity.
    friend bool operator==(const Value& a, const Value& b);

private:
    friend struct NodeData;
    using NodePtr = std::shared_ptr<const NodeData>;

    Tag tag_;
    std::variant<std::string, NodePtr, Opaque> payload_;
};

/// Nodes render as `Label(child,...)`, text as a double-quoted escaped literal.
std::string to_string(const Value& v);

std::string quote(std::string_view s, char q = '"');

} // namespace stackpeg
