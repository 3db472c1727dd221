#include "stackpeg/engine.hpp"

#include <algorithm>
#include <cctype>

namespace stackpeg {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string join_values(std::span<const Value> vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty())
            out += ", ";
        out += to_string(v);
    }
    return out;
}

} // namespace

std::string format_event(const TraceEvent& e) {
    std::string out = "step " + std::to_string(e.step) + ": " + e.expr + " @ " + std::to_string(e.cursor) + " -> ";
    switch (e.kind) {
    case TraceEvent::Kind::enter: out += "enter"; break;
    case TraceEvent::Kind::match: out += "match (cursor " + std::to_string(e.cursor_after) + ")"; break;
    case TraceEvent::Kind::mismatch: out += "mismatch"; break;
    case TraceEvent::Kind::reset: out += "reset (cursor " + std::to_string(e.cursor_after) + ")"; break;
    }
    return out;
}

std::string_view to_string(FaultKind k) {
    switch (k) {
    case FaultKind::action_exception: return "ActionException";
    case FaultKind::stack_underflow: return "StackUnderflow";
    case FaultKind::tag_mismatch: return "TagMismatch";
    case FaultKind::depth_limit: return "DepthLimit";
    case FaultKind::unresolved_rule: return "UnresolvedRule";
    }
    return "?";
}

ParserState::ParserState(std::string_view in, EngineOptions opts) : input(in), options(std::move(opts)) {}

class Interpreter {
public:
    Interpreter(ParserState& st, const Grammar& g)
        : st_(st), g_(g), logging_(static_cast<bool>(st.options.events)),
          collecting_(st.options.error_mode == ErrorMode::collect_traces) {}

    bool match(const RuleExpr& e, bool log_self = true) {
        ++st_.stats.steps;
        Depth guard(*this);
        const std::size_t entry = st_.cursor;
        const bool composite = !e.is_terminal() && !e.is<node::Push>() && !e.is<node::Drop>() && !e.is<node::Action>();
        if (logging_ && log_self && composite)
            emit(e, entry, TraceEvent::Kind::enter, 0);
        bool ok = dispatch(e);
        if (logging_ && log_self && (ok || !composite))
            emit(e, entry, ok ? TraceEvent::Kind::match : TraceEvent::Kind::mismatch, st_.cursor);
        return ok;
    }

private:
    struct Depth {
        Interpreter& in;
        explicit Depth(Interpreter& i) : in(i) {
            if (++in.depth_ > in.st_.options.max_depth)
                throw internal_fault(FaultKind::depth_limit,
                                     "recursion depth limit of " + std::to_string(in.st_.options.max_depth) +
                                         " exceeded at cursor " + std::to_string(in.st_.cursor));
        }
        ~Depth() { --in.depth_; }
    };

    bool dispatch(const RuleExpr& e) {
        auto& in = st_.input;
        auto& cur = st_.cursor;
        return std::visit(
            overloaded{
                [&](const node::Ch& n) { return single(e, cur < in.size() && in[cur] == n.c); },
                [&](const node::IgnoreCaseCh& n) { return single(e, cur < in.size() && fold(in[cur]) == n.c); },
                [&](const node::Str& n) { return literal(e, n.text, false, false); },
                [&](const node::IgnoreCaseStr& n) { return literal(e, n.text, true, false); },
                [&](const node::UnrolledStr& n) { return literal(e, n.text, false, true); },
                [&](const node::CharPred& n) { return single(e, cur < in.size() && n.pred.contains(in[cur])); },
                [&](const node::AnyChar&) { return single(e, cur < in.size()); },
                [&](const node::AnyOf& n) { return single(e, cur < in.size() && n.pred.contains(in[cur])); },
                [&](const node::NoneOf& n) { return single(e, cur < in.size() && n.pred.contains(in[cur])); },
                [&](const node::CharSetMask& n) {
                    bool hit = false;
                    if (cur < in.size()) {
                        auto c = static_cast<unsigned char>(in[cur]);
                        hit = c < 128 ? n.mask.test(c) : n.high;
                    }
                    return single(e, hit);
                },
                [&](const node::EndOfInput&) {
                    if (cur == in.size()) {
                        matched(cur);
                        return true;
                    }
                    mismatch(e, cur);
                    return false;
                },
                [&](const node::Sequence& n) {
                    for (const auto& i : n.items)
                        if (!match(*i))
                            return false;
                    return true;
                },
                [&](const node::FirstOf& n) {
                    for (const auto& a : n.alternatives) {
                        auto snap = save();
                        if (match(*a))
                            return true;
                        reset(e, snap);
                    }
                    return false;
                },
                [&](const node::Repeat& n) { return repeat(e, n); },
                [&](const node::AndPredicate& n) {
                    auto snap = save();
                    bool ok = match(*n.inner);
                    reset(e, snap);
                    return ok;
                },
                [&](const node::NotPredicate& n) {
                    auto snap = save();
                    ++not_depth_;
                    bool ok;
                    try {
                        ok = match(*n.inner);
                    } catch (...) {
                        --not_depth_;
                        throw;
                    }
                    --not_depth_;
                    reset(e, snap);
                    if (ok)
                        mismatch(e, snap.cursor);
                    return !ok;
                },
                [&](const node::Capture& n) {
                    const std::size_t start = cur;
                    if (!match(*n.inner))
                        return false;
                    st_.stack.push(Value::text(n.tag, std::string(in.substr(start, cur - start))));
                    return true;
                },
                [&](const node::Push& n) {
                    for (const auto& v : n.values)
                        st_.stack.push(v);
                    return true;
                },
                [&](const node::Drop& n) {
                    if (st_.stack.size() < n.count)
                        throw internal_fault(FaultKind::stack_underflow,
                                             "drop[" + std::to_string(n.count) + "] on a stack of " +
                                                 std::to_string(st_.stack.size()) + " value(s) at cursor " +
                                                 std::to_string(cur));
                    for (std::size_t i = 0; i < n.count; ++i)
                        st_.stack.pop();
                    return true;
                },
                [&](const node::Action& n) { return action(e, *n.def); },
                [&](const node::RuleRef& n) { return rule(n.name); },
                [&](const node::Quiet& n) {
                    ++quiet_depth_;
                    bool ok;
                    try {
                        ok = match(*n.inner);
                    } catch (...) {
                        --quiet_depth_;
                        throw;
                    }
                    --quiet_depth_;
                    return ok;
                },
            },
            e.node());
    }

    struct Snap {
        std::size_t cursor;
        ValueStack::Snapshot stack;
    };

    Snap save() const { return Snap{st_.cursor, st_.stack.snapshot()}; }

    void reset(const RuleExpr& at, const Snap& s) {
        if (logging_)
            emit(at, st_.cursor, TraceEvent::Kind::reset, s.cursor);
        st_.cursor = s.cursor;
        st_.stack.restore(s.stack);
    }

    bool single(const RuleExpr& e, bool hit) {
        if (hit) {
            ++st_.cursor;
            matched(st_.cursor);
            return true;
        }
        mismatch(e, st_.cursor);
        return false;
    }

    bool literal(const RuleExpr& e, const std::string& text, bool ignore_case, bool advance) {
        const auto& in = st_.input;
        const std::size_t start = st_.cursor;
        std::size_t i = 0;
        while (i < text.size() && start + i < in.size() && (ignore_case ? fold(in[start + i]) : in[start + i]) == text[i])
            ++i;
        if (i == text.size()) {
            st_.cursor = start + i;
            matched(st_.cursor);
            return true;
        }
        if (advance) {
            // The unrolled cascade has matched the first i characters one by one.
            st_.cursor = start + i;
            if (i > 0)
                matched(st_.cursor);
        }
        mismatch(e, start + i);
        return false;
    }

    bool repeat(const RuleExpr& e, const node::Repeat& n) {
        std::size_t count = 0;
        for (;;) {
            auto snap = save();
            if (!match(*n.inner)) {
                reset(e, snap);
                break;
            }
            ++count;
            if (n.kind == RepetitionKind::optional || st_.cursor == snap.cursor)
                break;
        }
        if (n.kind == RepetitionKind::one_or_more && count == 0)
            return false;
        if (n.collect) {
            std::vector<Value> items(count);
            for (std::size_t i = count; i-- > 0;)
                items[i] = st_.stack.pop();
            st_.stack.push(Value::node(list_of(*n.collect), "List", std::move(items)));
        }
        return true;
    }

    bool action(const RuleExpr& e, const ActionDef& def) {
        const std::size_t arity = def.arity();
        if (st_.stack.size() < arity)
            throw internal_fault(FaultKind::stack_underflow, "action " + def.name + " needs " + std::to_string(arity) +
                                                                 " value(s) but the stack holds " +
                                                                 std::to_string(st_.stack.size()));
        // v_n is popped first, so args end up deepest-first.
        std::vector<Value> args(arity);
        for (std::size_t i = arity; i-- > 0;) {
            args[i] = st_.stack.pop();
            if (!unify(args[i].tag(), def.effect.pops[i]))
                throw internal_fault(FaultKind::tag_mismatch, "action " + def.name + " expects " +
                                                                  def.effect.pops[i].name() + " for argument " +
                                                                  std::to_string(i + 1) + " but found " +
                                                                  args[i].tag().name());
        }
        std::optional<std::vector<Value>> out;
        try {
            out = def.fn(args, ActionContext{st_.input, st_.cursor});
        } catch (const std::exception& ex) {
            throw internal_fault(FaultKind::action_exception, "action " + def.name + " failed: " + ex.what());
        } catch (...) {
            throw internal_fault(FaultKind::action_exception, "action " + def.name + " failed");
        }
        if (!out) {
            mismatch(e, st_.cursor);
            return false;
        }
        if (out->size() != def.effect.pushes.size())
            throw internal_fault(FaultKind::tag_mismatch, "action " + def.name + " declared " +
                                                              std::to_string(def.effect.pushes.size()) +
                                                              " result(s) but produced " + std::to_string(out->size()) +
                                                              " (" + join_values(*out) + ")");
        for (std::size_t i = 0; i < out->size(); ++i) {
            if (!unify((*out)[i].tag(), def.effect.pushes[i]))
                throw internal_fault(FaultKind::tag_mismatch, "action " + def.name + " declared result " +
                                                                  def.effect.pushes[i].name() + " but produced " +
                                                                  (*out)[i].tag().name());
            st_.stack.push(std::move((*out)[i]));
        }
        return true;
    }

    bool rule(const std::string& name) {
        const auto* r = g_.find(name);
        if (!r)
            throw internal_fault(FaultKind::unresolved_rule, "rule '" + name + "' is not defined");
        if (st_.options.detect_reentry) {
            for (const auto& [def, at] : calls_)
                if (def == r && at == st_.cursor) {
                    ++st_.stats.reentries;
                    break;
                }
        }
        calls_.emplace_back(r, st_.cursor);
        if (collecting_)
            frames_.push_back(r->name);
        bool ok;
        try {
            ok = match(*r->expr, false);
        } catch (...) {
            calls_.pop_back();
            if (collecting_)
                frames_.pop_back();
            throw;
        }
        calls_.pop_back();
        if (collecting_)
            frames_.pop_back();
        return ok;
    }

    void matched(std::size_t cursor) { st_.stats.max_matched = std::max(st_.stats.max_matched, cursor); }

    void mismatch(const RuleExpr& e, std::size_t at) {
        ++st_.stats.terminal_mismatches;
        if (not_depth_ > 0)
            return;
        st_.stats.max_cursor = std::max(st_.stats.max_cursor, at);
        if (!collecting_ || quiet_depth_ > 0 || at != st_.options.principal_index)
            return;
        std::string terminal = e.is<node::NotPredicate>() ? "!" + to_notation(*e.as<node::NotPredicate>()->inner)
                               : e.is<node::Action>()     ? e.as<node::Action>()->def->name
                                                          : terminal_descriptor(e);
        std::string key;
        for (const auto& f : frames_)
            key += f + '\x1f';
        key += '\x1e' + terminal;
        if (st_.trace_keys_.insert(key).second)
            st_.traces_.push_back(RuleTrace{frames_, std::move(terminal)});
    }

    void emit(const RuleExpr& e, std::size_t cursor, TraceEvent::Kind kind, std::size_t after) {
        std::string expr;
        if (const auto* r = e.as<node::RuleRef>())
            expr = r->name;
        else
            expr = to_notation(e);
        st_.options.events(TraceEvent{++events_, std::move(expr), cursor, kind, after});
    }

    ParserState& st_;
    const Grammar& g_;
    const bool logging_;
    const bool collecting_;
    std::size_t depth_ = 0;
    int quiet_depth_ = 0;
    int not_depth_ = 0;
    std::size_t events_ = 0;
    std::vector<std::string> frames_;
    std::vector<std::pair<const RuleDef*, std::size_t>> calls_;
};

bool match_expr(ParserState& state, const ExprPtr& e, const Grammar& g) {
    const std::size_t cursor = state.cursor;
    const auto snap = state.stack.snapshot();
    Interpreter in(state, g);
    if (in.match(*e))
        return true;
    state.cursor = cursor;
    state.stack.restore(snap);
    return false;
}

RunResult run(const Grammar& g, std::string_view input, std::optional<std::string> start, const RunOptions& options) {
    const std::string name = start.value_or(g.start());
    RunResult result{InternalFault{FaultKind::unresolved_rule, "start rule '" + name + "' is not defined"}, {}};
    if (!g.contains(name))
        return result;

    EngineOptions opts;
    opts.events = options.events;
    opts.max_depth = options.max_depth;
    ParserState state(input, std::move(opts));
    try {
        bool ok = match_expr(state, rules::ref(name), g);
        result.stats = state.stats;
        if (ok) {
            result.outcome = Success{state.stack.take()};
            return result;
        }
        result.outcome = ParseFailure{analyze_failure(g, name, input)};
    } catch (const internal_fault& f) {
        result.stats = state.stats;
        result.outcome = InternalFault{f.kind(), f.what()};
    }
    return result;
}

parse_error_exception::parse_error_exception(ParseError e)
    : std::runtime_error([&] {
          std::string msg = "parse error at line " + std::to_string(e.position.line) + ", column " +
                            std::to_string(e.position.column);
          auto exp = e.expected();
          if (!exp.empty()) {
              msg += ", expected";
              for (std::size_t i = 0; i < exp.size(); ++i)
                  msg += (i ? ", " : " ") + exp[i];
          }
          return msg;
      }()),
      error_(std::move(e)) {}

} // namespace stackpeg
