#include "branesim/ast.hpp"

#include <sstream>

namespace brane {

const char* to_keyword(ActionKind k) {
    switch (k) {
        case ActionKind::Phago: return "phago";
        case ActionKind::CoPhago: return "cophago";
        case ActionKind::Exo: return "exo";
        case ActionKind::CoExo: return "coexo";
        case ActionKind::Pino: return "pino";
    }
    return "?";
}

MembranePtr zero_membrane() {
    static const MembranePtr zero = std::make_shared<Membrane>();
    return zero;
}

MembranePtr par(MembranePtr a, MembranePtr b) {
    auto m = std::make_shared<Membrane>();
    m->tag = Membrane::Tag::Par;
    m->left = std::move(a);
    m->right = std::move(b);
    return m;
}

MembranePtr action(ActionKind kind, Name channel, MembranePtr argument,
                   MembranePtr continuation) {
    auto m = std::make_shared<Membrane>();
    m->tag = Membrane::Tag::Action;
    m->kind = kind;
    m->channel = std::move(channel);
    m->argument = std::move(argument);
    m->continuation = continuation ? std::move(continuation) : zero_membrane();
    return m;
}

SystemPtr void_system() {
    static const SystemPtr v = std::make_shared<System>();
    return v;
}

SystemPtr compose(SystemPtr a, SystemPtr b) {
    auto s = std::make_shared<System>();
    s->tag = System::Tag::Compose;
    s->left = std::move(a);
    s->right = std::move(b);
    return s;
}

SystemPtr cell(MembranePtr membrane, SystemPtr content) {
    auto s = std::make_shared<System>();
    s->tag = System::Tag::Cell;
    s->membrane = std::move(membrane);
    s->content = std::move(content);
    return s;
}

SystemPtr replicate(const Count& n, const SystemPtr& s) {
    if (n <= 0) return void_system();
    if (n == 1) return s;
    // Binary decomposition: result for n = 2q + r is compose of the doubled
    // half (shared on both sides) and, for odd n, one extra copy.
    SystemPtr half = replicate(n / 2, s);
    SystemPtr both = compose(half, half);
    if (n % 2 == 1) both = compose(both, s);
    return both;
}

// ── printing ────────────────────────────────────────────────────────────────

namespace {

void print_membrane(std::ostream& os, const Membrane& m, bool parenthesize_par);

// A guard body after '.' is either another guard or a parenthesized membrane.
void print_guard_body(std::ostream& os, const Membrane& m) {
    if (m.tag == Membrane::Tag::Action) {
        print_membrane(os, m, false);
    } else {
        os << '(';
        print_membrane(os, m, false);
        os << ')';
    }
}

void print_membrane(std::ostream& os, const Membrane& m, bool parenthesize_par) {
    switch (m.tag) {
        case Membrane::Tag::Zero:
            os << '0';
            return;
        case Membrane::Tag::Par:
            if (parenthesize_par) os << '(';
            print_membrane(os, *m.left, false);
            os << '|';
            print_membrane(os, *m.right, false);
            if (parenthesize_par) os << ')';
            return;
        case Membrane::Tag::Action:
            os << to_keyword(m.kind) << '<' << m.channel << '>';
            if (m.argument) {
                os << '(';
                print_membrane(os, *m.argument, false);
                os << ')';
            }
            if (m.continuation->tag != Membrane::Tag::Zero) {
                os << '.';
                print_guard_body(os, *m.continuation);
            }
            return;
    }
}

void print_system(std::ostream& os, const System& s) {
    switch (s.tag) {
        case System::Tag::Void:
            os << "void";
            return;
        case System::Tag::Compose:
            print_system(os, *s.left);
            os << " o ";
            print_system(os, *s.right);
            return;
        case System::Tag::Cell:
            print_membrane(os, *s.membrane, false);
            os << '[';
            print_system(os, *s.content);
            os << ']';
            return;
    }
}

}  // namespace

std::string to_string(const MembranePtr& m) {
    std::ostringstream os;
    print_membrane(os, *m, false);
    return os.str();
}

std::string to_string(const SystemPtr& s) {
    std::ostringstream os;
    print_system(os, *s);
    return os.str();
}

}  // namespace brane
