// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_CORE_HPP_
#define MPST_CORE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpst {

// A protocol participant, compared by exact name.
struct Role {
  std::string name;

  friend auto operator<=>(const Role&, const Role&) = default;
};

// A message label within a choice.
struct Label {
  std::string name;

  friend auto operator<=>(const Label&, const Label&) = default;
};

// Closed set of payload sorts.
enum class Sort { Int, Bool, Real, Unit };

const char* sort_name(Sort s);
std::optional<Sort> sort_from_name(const std::string& name);

// Ground subtyping: reflexive, plus int <: real.
bool ground_subtype(Sort s1, Sort s2);

// Source position attached to parsed nodes; defaulted elsewhere.
struct SourceSpan {
  std::string file;
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Global types

struct GlobalType;
using GlobalPtr = std::shared_ptr<const GlobalType>;

struct GBranch {
  Label label;
  Sort sort = Sort::Unit;
  GlobalPtr cont;
};

struct GlobalType {
  enum class Kind { End, Var, Rec, Comm, EnRoute };

  Kind kind = Kind::End;
  std::string var;              // Var, Rec
  GlobalPtr body;               // Rec
  Role from, to;                // Comm, EnRoute
  std::vector<GBranch> branches;  // Comm (non-empty); EnRoute uses branches[0]
  SourceSpan span;
};

GlobalPtr g_end();
GlobalPtr g_var(std::string name);
GlobalPtr g_rec(std::string name, GlobalPtr body);
GlobalPtr g_comm(Role from, Role to, std::vector<GBranch> branches);
GlobalPtr g_enroute(Role from, Role to, Label label, Sort sort, GlobalPtr cont);

// ---------------------------------------------------------------------------
// Local types

struct LocalType;
using LocalPtr = std::shared_ptr<const LocalType>;

struct LBranch {
  Label label;
  Sort sort = Sort::Unit;
  LocalPtr cont;
};

struct LocalType {
  enum class Kind { End, Var, Rec, Branch, Select };

  Kind kind = Kind::End;
  std::string var;   // Var, Rec
  LocalPtr body;     // Rec
  Role peer;         // Branch, Select
  std::vector<LBranch> branches;
  SourceSpan span;
};

LocalPtr l_end();
LocalPtr l_var(std::string name);
LocalPtr l_rec(std::string name, LocalPtr body);
LocalPtr l_branch(Role peer, std::vector<LBranch> branches);
LocalPtr l_select(Role peer, std::vector<LBranch> branches);

// ---------------------------------------------------------------------------
// Queue types

struct QueueEntry {
  Role dest;
  Label label;
  Sort sort = Sort::Unit;

  friend auto operator<=>(const QueueEntry&, const QueueEntry&) = default;
};

using QueueType = std::vector<QueueEntry>;

// Canonical representative of the commutation-equivalence class: stable sort
// by destination, per-destination FIFO order untouched.
QueueType normalize_queue(const QueueType& h);
bool queue_equiv(const QueueType& h1, const QueueType& h2);

// Same shape after normalization, payload sorts covariant.
bool queue_subtype(const QueueType& h1, const QueueType& h2);

// ---------------------------------------------------------------------------
// Well-formedness

struct WellformednessError : std::runtime_error {
  SourceSpan span;
  WellformednessError(const std::string& msg, SourceSpan sp)
      : std::runtime_error(msg), span(std::move(sp)) {}
};

// Throws WellformednessError on self-communication, unbound or unguarded
// recursion variables, duplicate or empty branch label sets.
void validate_global(const GlobalPtr& g);
void validate_local(const LocalPtr& t);

bool is_closed_global(const GlobalPtr& g);
bool is_closed_local(const LocalPtr& t);

// ---------------------------------------------------------------------------
// Unfolding and role functions

GlobalPtr unfold_global(const GlobalPtr& g);
LocalPtr unfold_local(const LocalPtr& t);

struct RoleSets {
  std::set<Role> roles;
  std::set<Role> sroles;   // senders of en-route transmissions
  std::set<Role> aroles;   // roles with pending actions
  std::set<std::pair<Role, Role>> mroles;  // (sender, receiver) of en-route

  friend bool operator==(const RoleSets&, const RoleSets&) = default;
};

RoleSets role_sets(const GlobalPtr& g);

// Structural equality of ASTs (names, order and spans ignored for spans only).
bool structurally_equal(const GlobalPtr& a, const GlobalPtr& b);
bool structurally_equal(const LocalPtr& a, const LocalPtr& b);

}  // namespace mpst

#endif  // MPST_CORE_HPP_
