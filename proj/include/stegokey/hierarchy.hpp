#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stegokey/errors.hpp"

namespace stegokey {

using ClassId = std::uint32_t;
using UserId = std::uint32_t;

/// Public filler values padding every polynomial argument vector to length m.
using DummyParams = std::vector<std::uint64_t>;

struct ClassNode {
    ClassId id = 0;
    std::uint64_t public_param = 0;
    std::set<ClassId> parents;
    std::set<UserId> users;

    bool operator==(const ClassNode&) const = default;
};

/// The access-control DAG. Single writer (the central authority mutates),
/// queries are pure; copies are safe to hand to other threads.
class Hierarchy {
public:
    Hierarchy() = default;
    explicit Hierarchy(std::vector<ClassNode> nodes);

    bool contains(ClassId c) const { return nodes_.count(c) != 0; }
    const ClassNode& node(ClassId c) const;
    std::size_t size() const { return nodes_.size(); }

    /// Class ids in ascending order.
    std::vector<ClassId> ids() const;

    /// Stable topological order: every class appears after all its ancestors.
    std::vector<ClassId> topological_order() const;

    /// Transitive ancestors of c, excluding c itself. Cached; the cache is
    /// rebuilt on every structural change.
    const std::set<ClassId>& ancestor_set(ClassId c) const;

    bool is_ancestor(ClassId ancestor, ClassId descendant) const;

    /// S_j minus (S_i and the ancestor itself), ascending by id. Throws
    /// NotAncestor when `ancestor` is not strictly above `descendant`.
    std::vector<ClassId> relative_set(ClassId ancestor, ClassId descendant) const;

    std::size_t max_ancestor_count() const;

    // Mutations. Each one revalidates and rebuilds the ancestor cache.
    void add_class(ClassNode node);
    void remove_class(ClassId c); // children re-parent to the removed class's parents
    void add_user(ClassId c, UserId u);
    void remove_user(ClassId c, UserId u);

    bool operator==(const Hierarchy& other) const { return nodes_ == other.nodes_; }

private:
    void rebuild(); // cycle check + transitive closure

    std::map<ClassId, ClassNode> nodes_;
    std::map<ClassId, std::set<ClassId>> closure_;
};

/// Returns `configured` when it satisfies m >= max|S_i| + 1, the minimal
/// valid value when nothing was configured, and throws MTooSmall otherwise.
std::uint32_t choose_m(const Hierarchy& h, std::optional<std::uint32_t> configured = std::nullopt);

/// Argument vector a class feeds the polynomial to compute its own key:
/// [s_c, params of its ancestors ascending by id, dummy padding] of length m.
std::vector<std::uint64_t> key_params(const Hierarchy& h, ClassId c, std::uint32_t m,
                                      const DummyParams& dummies);

/// Argument vector an ancestor feeds the polynomial to derive a descendant's
/// key: [s_anc, s_desc, params of the ancestor's ancestors, params of the
/// relative set, dummy padding] of length m. A permutation of
/// key_params(descendant), which is what makes derivation sound.
std::vector<std::uint64_t> derivation_params(const Hierarchy& h, ClassId ancestor,
                                             ClassId descendant, std::uint32_t m,
                                             const DummyParams& dummies);

/// Dummy param sanity: pairwise distinct, length >= m - 1. Overlaps with
/// class params are reported as warnings, not errors; the stock parameter
/// tables collide and still have to load.
std::vector<std::string> check_dummies(const Hierarchy& h, const DummyParams& dummies,
                                       std::uint32_t m);

// --- membership dynamics -------------------------------------------------

enum class EventKind { Join, Leave };
enum class EventScope { User, Class };

struct MembershipEvent {
    EventKind kind = EventKind::Join;
    EventScope scope = EventScope::User;
    ClassId class_id = 0;
    UserId user_id = 0;
    ClassNode new_class; // only for class-scope joins
};

struct RekeyEntry {
    std::uint64_t epoch = 0;
    std::uint32_t joins = 0;
    std::uint32_t leaves = 0;
    std::uint32_t unicast_msgs = 0;
    std::uint32_t broadcast_msgs = 0;
};

struct RekeyLog {
    std::vector<RekeyEntry> events;

    std::uint64_t total_unicasts() const;
    std::uint64_t total_broadcasts() const;
    std::uint64_t total_joins() const;
};

/// Applies one batch of membership events atomically. Every join costs two
/// unicasts, each non-empty batch one broadcast; the epoch is bumped when the
/// batch contains a leave or any class-level change.
RekeyEntry apply_batch(Hierarchy& h, std::uint64_t& epoch,
                       const std::vector<MembershipEvent>& batch, RekeyLog& log);

/// Single-event convenience wrapper around apply_batch.
RekeyEntry apply_membership_event(Hierarchy& h, std::uint64_t& epoch,
                                  const MembershipEvent& event, RekeyLog& log);

} // namespace stegokey
