#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stackpeg/value.hpp"

namespace stackpeg {

class stack_underflow : public std::runtime_error {
public:
    stack_underflow() : std::runtime_error("value stack underflow") {}
};

/// The untyped LIFO stack rules push to and pop from.
///
/// Every mutation is journaled, so a snapshot is a single journal offset and
/// restore() undoes mutations newest-first until the stack is back at that
/// point. Restoring to a snapshot taken before an earlier restore target is
/// fine; restoring to one taken after it is not.
class ValueStack {
public:
    class Snapshot {
    public:
        friend bool operator==(const Snapshot&, const Snapshot&) = default;

    private:
        friend class ValueStack;
        explicit Snapshot(std::size_t pos) : journal_pos_(pos) {}
        std::size_t journal_pos_;
    };

    void push(Value v);
    Value pop();
    const Value& peek() const;
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    Snapshot snapshot() const noexcept { return Snapshot(journal_.size()); }
    void restore(Snapshot s);

    /// Bottom-to-top view.
    std::span<const Value> items() const noexcept { return items_; }
    /// Moves the contents out and resets the stack and journal.
    std::vector<Value> take();

private:
    std::vector<Value> items_;
    // nullopt marks a push; a value is something popped.
    std::vector<std::optional<Value>> journal_;
};

} // namespace stackpeg
