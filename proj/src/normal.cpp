#include "branesim/normal.hpp"

namespace brane {

NormalSystem to_normal_form(const SystemPtr& s) {
    CanonSystemPtr canon = canonical_system(s);
    NormalSystem out;
    out.reserve(canon->cells.size());
    for (const auto& [c, count] : canon->cells)
        out.push_back({count, reify(c.membrane), reify(c.content)});
    return out;
}

SystemPtr unfold(const NormalSystem& n) {
    SystemPtr out;
    for (const auto& entry : n) {
        SystemPtr repeated = replicate(entry.count, cell(entry.membrane, entry.content));
        out = out ? compose(std::move(out), std::move(repeated)) : std::move(repeated);
    }
    return out ? out : void_system();
}

}  // namespace brane
