#include "stegokey/hierarchy.hpp"

#include <algorithm>
#include <numeric>

namespace stegokey {

Hierarchy::Hierarchy(std::vector<ClassNode> nodes) {
    for (auto& n : nodes) {
        if (nodes_.count(n.id)) {
            throw Error(ErrorCode::ConfigInvalid,
                        "duplicate class id " + std::to_string(n.id));
        }
        nodes_.emplace(n.id, std::move(n));
    }
    rebuild();
}

const ClassNode& Hierarchy::node(ClassId c) const {
    auto it = nodes_.find(c);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::UnknownClass, "class " + std::to_string(c));
    }
    return it->second;
}

std::vector<ClassId> Hierarchy::ids() const {
    std::vector<ClassId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) out.push_back(id);
    return out;
}

std::vector<ClassId> Hierarchy::topological_order() const {
    // Kahn's algorithm; ties broken by ascending id so the order is stable.
    std::map<ClassId, std::size_t> indegree;
    for (const auto& [id, n] : nodes_) indegree[id] = n.parents.size();
    std::set<ClassId> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.insert(id);
    }
    std::vector<ClassId> order;
    order.reserve(nodes_.size());
    while (!ready.empty()) {
        ClassId c = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(c);
        for (const auto& [id, n] : nodes_) {
            if (n.parents.count(c) && --indegree[id] == 0) ready.insert(id);
        }
    }
    return order;
}

const std::set<ClassId>& Hierarchy::ancestor_set(ClassId c) const {
    auto it = closure_.find(c);
    if (it == closure_.end()) {
        throw Error(ErrorCode::UnknownClass, "class " + std::to_string(c));
    }
    return it->second;
}

bool Hierarchy::is_ancestor(ClassId ancestor, ClassId descendant) const {
    return ancestor_set(descendant).count(ancestor) != 0;
}

std::vector<ClassId> Hierarchy::relative_set(ClassId ancestor, ClassId descendant) const {
    const auto& desc_anc = ancestor_set(descendant);
    if (!desc_anc.count(ancestor)) {
        throw Error(ErrorCode::NotAncestor,
                    "class " + std::to_string(ancestor) + " is not an ancestor of " +
                        std::to_string(descendant));
    }
    const auto& anc_anc = ancestor_set(ancestor);
    std::vector<ClassId> out;
    for (ClassId c : desc_anc) {
        if (c != ancestor && !anc_anc.count(c)) out.push_back(c);
    }
    return out; // set iteration is already ascending
}

std::size_t Hierarchy::max_ancestor_count() const {
    std::size_t m = 0;
    for (const auto& [id, anc] : closure_) m = std::max(m, anc.size());
    return m;
}

void Hierarchy::add_class(ClassNode node) {
    if (nodes_.count(node.id)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "class " + std::to_string(node.id) + " already exists");
    }
    for (ClassId p : node.parents) {
        if (!nodes_.count(p)) {
            throw Error(ErrorCode::UnknownClass, "parent " + std::to_string(p));
        }
    }
    nodes_.emplace(node.id, std::move(node));
    rebuild();
}

void Hierarchy::remove_class(ClassId c) {
    auto it = nodes_.find(c);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::UnknownClass, "class " + std::to_string(c));
    }
    const std::set<ClassId> orphan_parents = it->second.parents;
    nodes_.erase(it);
    // Children inherit the removed class's parents so the DAG stays connected.
    for (auto& [id, n] : nodes_) {
        if (n.parents.erase(c)) {
            n.parents.insert(orphan_parents.begin(), orphan_parents.end());
        }
    }
    rebuild();
}

void Hierarchy::add_user(ClassId c, UserId u) {
    auto it = nodes_.find(c);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::UnknownClass, "class " + std::to_string(c));
    }
    it->second.users.insert(u);
}

void Hierarchy::remove_user(ClassId c, UserId u) {
    auto it = nodes_.find(c);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::UnknownClass, "class " + std::to_string(c));
    }
    if (!it->second.users.erase(u)) {
        throw Error(ErrorCode::UnknownUser,
                    "user " + std::to_string(u) + " not in class " + std::to_string(c));
    }
}

void Hierarchy::rebuild() {
    closure_.clear();
    std::set<std::uint64_t> params;
    for (const auto& [id, n] : nodes_) {
        for (ClassId p : n.parents) {
            if (!nodes_.count(p)) {
                throw Error(ErrorCode::UnknownClass,
                            "class " + std::to_string(id) + " references missing parent " +
                                std::to_string(p));
            }
        }
        if (!params.insert(n.public_param).second) {
            throw Error(ErrorCode::ConfigInvalid,
                        "public param " + std::to_string(n.public_param) +
                            " assigned to more than one class");
        }
    }

    // Depth-first closure with an on-stack marker for cycle detection.
    enum class Mark { White, Grey, Black };
    std::map<ClassId, Mark> mark;
    for (const auto& [id, _] : nodes_) mark[id] = Mark::White;

    auto visit = [&](auto&& self, ClassId c) -> const std::set<ClassId>& {
        if (mark[c] == Mark::Grey) {
            throw Error(ErrorCode::CycleDetected,
                        "cycle through class " + std::to_string(c));
        }
        if (mark[c] == Mark::Black) return closure_[c];
        mark[c] = Mark::Grey;
        std::set<ClassId> anc;
        for (ClassId p : nodes_[c].parents) {
            anc.insert(p);
            const auto& up = self(self, p);
            anc.insert(up.begin(), up.end());
        }
        closure_[c] = std::move(anc);
        mark[c] = Mark::Black;
        return closure_[c];
    };
    for (const auto& [id, _] : nodes_) visit(visit, id);
}

std::uint32_t choose_m(const Hierarchy& h, std::optional<std::uint32_t> configured) {
    const auto minimal = static_cast<std::uint32_t>(h.max_ancestor_count() + 1);
    if (!configured) return minimal;
    if (*configured < minimal) {
        throw Error(ErrorCode::MTooSmall,
                    "configured m=" + std::to_string(*configured) + " but hierarchy needs m>=" +
                        std::to_string(minimal));
    }
    return *configured;
}

namespace {

void pad_with_dummies(std::vector<std::uint64_t>& vec, std::uint32_t m,
                      const DummyParams& dummies) {
    if (vec.size() > m) {
        throw Error(ErrorCode::MTooSmall,
                    "argument vector needs " + std::to_string(vec.size()) +
                        " slots but m=" + std::to_string(m));
    }
    const std::size_t need = m - vec.size();
    if (need > dummies.size()) {
        throw Error(ErrorCode::ConfigInvalid,
                    "need " + std::to_string(need) + " dummy params, have " +
                        std::to_string(dummies.size()));
    }
    vec.insert(vec.end(), dummies.begin(), dummies.begin() + static_cast<long>(need));
}

} // namespace

std::vector<std::uint64_t> key_params(const Hierarchy& h, ClassId c, std::uint32_t m,
                                      const DummyParams& dummies) {
    std::vector<std::uint64_t> vec;
    vec.push_back(h.node(c).public_param);
    for (ClassId a : h.ancestor_set(c)) vec.push_back(h.node(a).public_param);
    pad_with_dummies(vec, m, dummies);
    return vec;
}

std::vector<std::uint64_t> derivation_params(const Hierarchy& h, ClassId ancestor,
                                             ClassId descendant, std::uint32_t m,
                                             const DummyParams& dummies) {
    if (!h.is_ancestor(ancestor, descendant)) {
        throw Error(ErrorCode::NotAncestor,
                    "class " + std::to_string(ancestor) + " cannot derive for " +
                        std::to_string(descendant));
    }
    std::vector<std::uint64_t> vec;
    vec.push_back(h.node(ancestor).public_param);
    vec.push_back(h.node(descendant).public_param);
    for (ClassId a : h.ancestor_set(ancestor)) vec.push_back(h.node(a).public_param);
    for (ClassId r : h.relative_set(ancestor, descendant)) vec.push_back(h.node(r).public_param);
    pad_with_dummies(vec, m, dummies);
    return vec;
}

std::vector<std::string> check_dummies(const Hierarchy& h, const DummyParams& dummies,
                                       std::uint32_t m) {
    std::set<std::uint64_t> seen;
    for (auto d : dummies) {
        if (!seen.insert(d).second) {
            throw Error(ErrorCode::ConfigInvalid,
                        "duplicate dummy param " + std::to_string(d));
        }
    }
    if (m >= 1 && dummies.size() < static_cast<std::size_t>(m) - 1) {
        throw Error(ErrorCode::ConfigInvalid,
                    "m=" + std::to_string(m) + " requires at least " + std::to_string(m - 1) +
                        " dummy params, have " + std::to_string(dummies.size()));
    }
    std::vector<std::string> warnings;
    for (ClassId c : h.ids()) {
        if (seen.count(h.node(c).public_param)) {
            warnings.push_back("class " + std::to_string(c) + " param " +
                               std::to_string(h.node(c).public_param) +
                               " collides with a dummy param");
        }
    }
    return warnings;
}

std::uint64_t RekeyLog::total_unicasts() const {
    return std::accumulate(events.begin(), events.end(), std::uint64_t{0},
                           [](std::uint64_t s, const RekeyEntry& e) { return s + e.unicast_msgs; });
}

std::uint64_t RekeyLog::total_broadcasts() const {
    return std::accumulate(events.begin(), events.end(), std::uint64_t{0},
                           [](std::uint64_t s, const RekeyEntry& e) { return s + e.broadcast_msgs; });
}

std::uint64_t RekeyLog::total_joins() const {
    return std::accumulate(events.begin(), events.end(), std::uint64_t{0},
                           [](std::uint64_t s, const RekeyEntry& e) { return s + e.joins; });
}

RekeyEntry apply_batch(Hierarchy& h, std::uint64_t& epoch,
                       const std::vector<MembershipEvent>& batch, RekeyLog& log) {
    Hierarchy staged = h; // commit only if the whole batch applies
    RekeyEntry entry;
    bool bump = false;
    for (const auto& ev : batch) {
        switch (ev.scope) {
        case EventScope::User:
            if (ev.kind == EventKind::Join) {
                staged.add_user(ev.class_id, ev.user_id);
                ++entry.joins;
            } else {
                staged.remove_user(ev.class_id, ev.user_id);
                ++entry.leaves;
                bump = true;
            }
            break;
        case EventScope::Class:
            if (ev.kind == EventKind::Join) {
                staged.add_class(ev.new_class);
                ++entry.joins;
            } else {
                staged.remove_class(ev.class_id);
                ++entry.leaves;
            }
            bump = true; // any class-level change rekeys
            break;
        }
    }
    if (!batch.empty()) {
        entry.unicast_msgs = 2 * entry.joins; // key + polynomial share per joiner
        entry.broadcast_msgs = 1;
    }
    h = std::move(staged);
    if (bump) ++epoch;
    entry.epoch = epoch;
    log.events.push_back(entry);
    return entry;
}

RekeyEntry apply_membership_event(Hierarchy& h, std::uint64_t& epoch,
                                  const MembershipEvent& event, RekeyLog& log) {
    return apply_batch(h, epoch, {event}, log);
}

} // namespace stegokey
