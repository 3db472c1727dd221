#include "stackpeg/value_stack.hpp"

#include <cassert>
#include <utility>

namespace stackpeg {

void ValueStack::push(Value v) {
    items_.push_back(std::move(v));
    journal_.emplace_back(std::nullopt);
}

Value ValueStack::pop() {
    if (items_.empty())
        throw stack_underflow();
    Value v = items_.back();
    journal_.emplace_back(std::move(items_.back()));
    items_.pop_back();
    return v;
}

const Value& ValueStack::peek() const {
    if (items_.empty())
        throw stack_underflow();
    return items_.back();
}

void ValueStack::restore(Snapshot s) {
    assert(s.journal_pos_ <= journal_.size());
    while (journal_.size() > s.journal_pos_) {
        auto& entry = journal_.back();
        if (entry)
            items_.push_back(std::move(*entry));
        else
            items_.pop_back();
        journal_.pop_back();
    }
}

std::vector<Value> ValueStack::take() {
    journal_.clear();
    return std::exchange(items_, {});
}

} // namespace stackpeg
