#include "stackpeg/value.hpp"

#include <utility>

namespace stackpeg {

Tag list_of(const Tag& element) { return Tag("List<" + element.name() + ">"); }

std::optional<Tag> unify(const Tag& a, const Tag& b) {
    if (a.is_wildcard())
        return b;
    if (b.is_wildcard() || a == b)
        return a;
    return std::nullopt;
}

Value::NodeData::~NodeData() {
    std::vector<Value> pending = std::move(children);
    while (!pending.empty()) {
        Value v = std::move(pending.back());
        pending.pop_back();
        auto* np = std::get_if<NodePtr>(&v.payload_);
        if (np && np->use_count() == 1) {
            // Sole owner: steal the grandchildren so their teardown happens here.
            auto& kids = const_cast<NodeData&>(**np).children;
            for (auto& k : kids)
                pending.push_back(std::move(k));
            kids.clear();
        }
    }
}

Value Value::text(Tag tag, std::string s) {
    Value v;
    v.tag_ = std::move(tag);
    v.payload_ = std::move(s);
    return v;
}

Value Value::node(Tag tag, std::string label, std::vector<Value> children) {
    Value v;
    v.tag_ = std::move(tag);
    v.payload_ = std::make_shared<const NodeData>(std::move(label), std::move(children));
    return v;
}

const std::string& Value::as_text() const { return std::get<std::string>(payload_); }

const Value::NodeData& Value::as_node() const { return *std::get<NodePtr>(payload_); }

bool operator==(const Value& a, const Value& b) {
    std::vector<std::pair<const Value*, const Value*>> work{{&a, &b}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        if (x->tag_ != y->tag_ || x->payload_.index() != y->payload_.index())
            return false;
        if (const auto* s = std::get_if<std::string>(&x->payload_)) {
            if (*s != std::get<std::string>(y->payload_))
                return false;
        } else if (const auto* n = std::get_if<Value::NodePtr>(&x->payload_)) {
            const auto& m = std::get<Value::NodePtr>(y->payload_);
            if (*n == m)
                continue;
            if ((*n)->label != m->label || (*n)->children.size() != m->children.size())
                return false;
            for (std::size_t i = 0; i < m->children.size(); ++i)
                work.emplace_back(&(*n)->children[i], &m->children[i]);
        } else {
            const auto& o = std::get<Value::Opaque>(x->payload_);
            const auto& p = std::get<Value::Opaque>(y->payload_);
            if (o.ptr != p.ptr || o.type != p.type)
                return false;
        }
    }
    return true;
}

std::string quote(std::string_view s, char q) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(1, q);
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\\': out += "\\\\"; break;
        default:
            if (c == q) {
                out += '\\';
                out += c;
            } else if (u < 32 || u == 127) {
                out += "\\x";
                out += hex[u >> 4];
                out += hex[u & 15];
            } else {
                out += c;
            }
        }
    }
    out += q;
    return out;
}

namespace {

void render(const Value& v, std::string& out) {
    if (v.is_text()) {
        out += quote(v.as_text());
    } else if (v.is_node()) {
        const auto& n = v.as_node();
        out += n.label;
        out += '(';
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += ',';
            render(n.children[i], out);
        }
        out += ')';
    } else {
        out += "<opaque:" + v.tag().name() + ">";
    }
}

} // namespace

std::string to_string(const Value& v) {
    std::string out;
    render(v, out);
    return out;
}

} // namespace stackpeg
