#include "branesim/canonical.hpp"

#include <algorithm>
#include <sstream>

namespace brane {

// ── total order ─────────────────────────────────────────────────────────────

namespace {

int compare_count(const Count& a, const Count& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

template <typename Entry>
int compare_entries(const std::vector<Entry>& a, const std::vector<Entry>& b,
                    int (*cmp_key)(const decltype(Entry::first)&,
                                   const decltype(Entry::first)&)) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp_key(a[i].first, b[i].first)) return c;
        if (int c = compare_count(a[i].second, b[i].second)) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

}  // namespace

int compare(const CanonAction& a, const CanonAction& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    if (int c = a.channel.compare(b.channel)) return c < 0 ? -1 : 1;
    if (int c = compare(a.argument, b.argument)) return c;
    return compare(a.continuation, b.continuation);
}

int compare(const CanonMembranePtr& a, const CanonMembranePtr& b) {
    if (a == b) return 0;
    if (!a || !b) return !a ? -1 : 1;  // only unary-action arguments are null
    return compare_entries(a->actions, b->actions, &compare);
}

int compare(const CanonCell& a, const CanonCell& b) {
    if (int c = compare(a.membrane, b.membrane)) return c;
    return compare(a.content, b.content);
}

int compare(const CanonSystemPtr& a, const CanonSystemPtr& b) {
    if (a == b) return 0;
    if (!a || !b) return !a ? -1 : 1;
    return compare_entries(a->cells, b->cells, &compare);
}

// ── construction ────────────────────────────────────────────────────────────

CanonMembranePtr empty_canon_membrane() {
    static const CanonMembranePtr m = std::make_shared<CanonMembrane>();
    return m;
}

CanonSystemPtr empty_canon_system() {
    static const CanonSystemPtr s = std::make_shared<CanonSystem>();
    return s;
}

namespace {

// Sorts entries by key, coalesces equal keys, drops nonpositive counts.
template <typename Entry>
void normalize_entries(std::vector<Entry>& entries,
                       int (*cmp_key)(const decltype(Entry::first)&,
                                      const decltype(Entry::first)&)) {
    std::sort(entries.begin(), entries.end(), [&](const Entry& x, const Entry& y) {
        return cmp_key(x.first, y.first) < 0;
    });
    std::vector<Entry> merged;
    merged.reserve(entries.size());
    for (auto& e : entries) {
        if (!merged.empty() && cmp_key(merged.back().first, e.first) == 0)
            merged.back().second += e.second;
        else
            merged.push_back(std::move(e));
    }
    entries.clear();
    for (auto& e : merged)
        if (e.second > 0) entries.push_back(std::move(e));
}

}  // namespace

CanonMembranePtr make_canon_membrane(std::vector<std::pair<CanonAction, Count>> entries) {
    normalize_entries(entries, &compare);
    if (entries.empty()) return empty_canon_membrane();
    auto m = std::make_shared<CanonMembrane>();
    m->actions = std::move(entries);
    return m;
}

CanonSystemPtr make_canon_system(std::vector<std::pair<CanonCell, Count>> entries) {
    normalize_entries(entries, &compare);
    if (entries.empty()) return empty_canon_system();
    auto s = std::make_shared<CanonSystem>();
    s->cells = std::move(entries);
    return s;
}

CanonMembranePtr singleton_membrane(CanonAction a, Count n) {
    return make_canon_membrane({{std::move(a), std::move(n)}});
}

CanonMembranePtr merge(const CanonMembranePtr& a, const CanonMembranePtr& b) {
    if (a->empty()) return b;
    if (b->empty()) return a;
    auto entries = a->actions;
    entries.insert(entries.end(), b->actions.begin(), b->actions.end());
    return make_canon_membrane(std::move(entries));
}

CanonSystemPtr merge(const CanonSystemPtr& a, const CanonSystemPtr& b) {
    if (a->empty()) return b;
    if (b->empty()) return a;
    auto entries = a->cells;
    entries.insert(entries.end(), b->cells.begin(), b->cells.end());
    return make_canon_system(std::move(entries));
}

CanonMembranePtr without_action(const CanonMembranePtr& m, const CanonAction& a,
                                const Count& n) {
    auto entries = m->actions;
    for (auto& e : entries) {
        if (compare(e.first, a) == 0) {
            if (e.second < n) throw std::logic_error("without_action: multiplicity underflow");
            e.second -= n;
            return make_canon_membrane(std::move(entries));
        }
    }
    throw std::logic_error("without_action: action not present");
}

CanonSystemPtr without_cell(const CanonSystemPtr& s, const CanonCell& c, const Count& n) {
    auto entries = s->cells;
    for (auto& e : entries) {
        if (compare(e.first, c) == 0) {
            if (e.second < n) throw std::logic_error("without_cell: multiplicity underflow");
            e.second -= n;
            return make_canon_system(std::move(entries));
        }
    }
    throw std::logic_error("without_cell: cell not present");
}

CanonSystemPtr make_cell_system(const CanonMembranePtr& membrane,
                                const CanonSystemPtr& content, const Count& count) {
    if (membrane->empty() && content->empty()) return empty_canon_system();
    return make_canon_system({{CanonCell{membrane, content}, count}});
}

// ── canonicalization ────────────────────────────────────────────────────────

CanonMembranePtr Canonicalizer::membrane(const MembranePtr& m) {
    auto it = mem_memo_.find(m.get());
    if (it != mem_memo_.end()) return it->second;
    CanonMembranePtr result;
    switch (m->tag) {
        case Membrane::Tag::Zero:
            result = empty_canon_membrane();
            break;
        case Membrane::Tag::Par:
            result = merge(membrane(m->left), membrane(m->right));
            break;
        case Membrane::Tag::Action: {
            CanonAction a;
            a.kind = m->kind;
            a.channel = m->channel;
            a.argument = m->argument ? membrane(m->argument) : nullptr;
            a.continuation = membrane(m->continuation);
            result = singleton_membrane(std::move(a));
            break;
        }
    }
    mem_memo_.emplace(m.get(), result);
    return result;
}

CanonSystemPtr Canonicalizer::system(const SystemPtr& s) {
    auto it = sys_memo_.find(s.get());
    if (it != sys_memo_.end()) return it->second;
    CanonSystemPtr result;
    switch (s->tag) {
        case System::Tag::Void:
            result = empty_canon_system();
            break;
        case System::Tag::Compose:
            result = merge(system(s->left), system(s->right));
            break;
        case System::Tag::Cell:
            result = make_cell_system(membrane(s->membrane), system(s->content));
            break;
    }
    sys_memo_.emplace(s.get(), result);
    return result;
}

CanonMembranePtr canonical_membrane(const MembranePtr& m) {
    return Canonicalizer().membrane(m);
}

CanonSystemPtr canonical_system(const SystemPtr& s) { return Canonicalizer().system(s); }

// ── back to syntax ──────────────────────────────────────────────────────────

namespace {

MembranePtr par_replicate(const Count& n, const MembranePtr& m) {
    if (n <= 0) return zero_membrane();
    if (n == 1) return m;
    MembranePtr half = par_replicate(n / 2, m);
    MembranePtr both = par(half, half);
    if (n % 2 == 1) both = par(both, m);
    return both;
}

}  // namespace

MembranePtr reify(const CanonMembranePtr& m) {
    MembranePtr out;
    for (const auto& [a, count] : m->actions) {
        MembranePtr one = action(a.kind, a.channel, a.argument ? reify(a.argument) : nullptr,
                                 reify(a.continuation));
        MembranePtr repeated = par_replicate(count, one);
        out = out ? par(std::move(out), std::move(repeated)) : std::move(repeated);
    }
    return out ? out : zero_membrane();
}

SystemPtr reify(const CanonSystemPtr& s) {
    SystemPtr out;
    for (const auto& [c, count] : s->cells) {
        SystemPtr one = cell(reify(c.membrane), reify(c.content));
        SystemPtr repeated = replicate(count, one);
        out = out ? compose(std::move(out), std::move(repeated)) : std::move(repeated);
    }
    return out ? out : void_system();
}

// ── printing ────────────────────────────────────────────────────────────────

namespace {

void print_canon_membrane(std::ostream& os, const CanonMembrane& m);

void print_canon_action(std::ostream& os, const CanonAction& a) {
    os << to_keyword(a.kind) << '<' << a.channel << '>';
    if (a.argument) {
        os << '(';
        print_canon_membrane(os, *a.argument);
        os << ')';
    }
    if (!a.continuation->empty()) {
        os << '.';
        // A single-action continuation prints as a guard; anything else needs
        // the parenthesized form.
        if (a.continuation->actions.size() == 1 && a.continuation->actions[0].second == 1) {
            print_canon_action(os, a.continuation->actions[0].first);
        } else {
            os << '(';
            print_canon_membrane(os, *a.continuation);
            os << ')';
        }
    }
}

void print_canon_membrane(std::ostream& os, const CanonMembrane& m) {
    if (m.empty()) {
        os << '0';
        return;
    }
    bool first = true;
    for (const auto& [a, count] : m.actions) {
        for (Count i = 0; i < count; ++i) {
            if (!first) os << '|';
            first = false;
            print_canon_action(os, a);
        }
    }
}

void print_canon_system(std::ostream& os, const CanonSystem& s) {
    if (s.empty()) {
        os << "void";
        return;
    }
    bool first = true;
    for (const auto& [c, count] : s.cells) {
        if (!first) os << " o ";
        first = false;
        if (count != 1) os << count << " * ";
        print_canon_membrane(os, *c.membrane);
        os << '[';
        print_canon_system(os, *c.content);
        os << ']';
    }
}

}  // namespace

std::string to_string(const CanonMembranePtr& m) {
    std::ostringstream os;
    print_canon_membrane(os, *m);
    return os.str();
}

std::string to_string(const CanonSystemPtr& s) {
    std::ostringstream os;
    print_canon_system(os, *s);
    return os.str();
}

}  // namespace brane
