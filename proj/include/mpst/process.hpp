// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_PROCESS_HPP_
#define MPST_PROCESS_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core.hpp"
#include "mpst/subtyping.hpp"

namespace mpst {

// ---------------------------------------------------------------------------
// Expressions and values

struct Value {
  Sort sort = Sort::Unit;
  long long i = 0;  // Int
  bool b = false;   // Bool
  double r = 0.0;   // Real

  static Value unit() { return Value{}; }
  static Value of_int(long long v) { return Value{Sort::Int, v, false, 0.0}; }
  static Value of_bool(bool v) { return Value{Sort::Bool, 0, v, 0.0}; }
  static Value of_real(double v) { return Value{Sort::Real, 0, false, v}; }

  friend bool operator==(const Value&, const Value&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, BoolLit, UnitLit, Var, Add, Sub, Less, Eq, NondetBool };
  Kind kind = Kind::UnitLit;
  long long i = 0;
  bool b = false;
  std::string var;
  ExprPtr lhs, rhs;
};

ExprPtr e_int(long long v);
ExprPtr e_bool(bool v);
ExprPtr e_unit();
ExprPtr e_var(std::string name);
ExprPtr e_add(ExprPtr a, ExprPtr b);
ExprPtr e_sub(ExprPtr a, ExprPtr b);
ExprPtr e_less(ExprPtr a, ExprPtr b);
ExprPtr e_eq(ExprPtr a, ExprPtr b);
ExprPtr e_nondet();

// Deterministic stream of pseudo-random bits for NondetBool.
class SeedStream {
 public:
  explicit SeedStream(uint64_t seed) : state_(seed * 2654435769u + 1) {}
  bool next_bool();

 private:
  uint64_t state_;
};

using ValueEnv = std::map<std::string, Value>;

// Absent result models a stuck evaluation (the Err-Eval hypothesis).
std::optional<Value> eval_expr(const ExprPtr& e, const ValueEnv& env, SeedStream& seeds);

// ---------------------------------------------------------------------------
// Processes and sessions

struct Process;
using ProcessPtr = std::shared_ptr<const Process>;

struct RecvClause {
  Label label;
  std::string bind_var;
  Sort bind_sort = Sort::Unit;
  ProcessPtr cont;
};

struct Process {
  enum class Kind { Inact, Send, Recv, If, Rec, PVar };
  Kind kind = Kind::Inact;
  Role peer;                       // Send, Recv
  Label label;                     // Send
  ExprPtr expr;                    // Send payload, If condition
  ProcessPtr cont;                 // Send
  std::vector<RecvClause> clauses;  // Recv
  ProcessPtr then_branch, else_branch;  // If
  std::string var;                 // Rec, PVar
  ProcessPtr body;                 // Rec
  SourceSpan span;
};

ProcessPtr p_inact();
ProcessPtr p_send(Role peer, Label label, ExprPtr expr, ProcessPtr cont);
ProcessPtr p_recv(Role peer, std::vector<RecvClause> clauses);
ProcessPtr p_if(ExprPtr cond, ProcessPtr then_b, ProcessPtr else_b);
ProcessPtr p_rec(std::string var, ProcessPtr body);
ProcessPtr p_pvar(std::string var);

void validate_process(const ProcessPtr& p);

struct RuntimeMessage {
  Role dest;
  Label label;
  Value value;

  friend bool operator==(const RuntimeMessage&, const RuntimeMessage&) = default;
};

using RuntimeQueue = std::vector<RuntimeMessage>;

struct Session {
  struct Part {
    ProcessPtr process;
    RuntimeQueue queue;
  };
  std::map<Role, Part> parts;
};

// Queue typing: element-wise sorts.
QueueType type_queue(const RuntimeQueue& h);

// ---------------------------------------------------------------------------
// Typing

struct TypingEnv {
  std::map<std::string, LocalPtr> process_vars;
  std::map<std::string, Sort> expr_vars;
};

// Syntax-directed minimal type; conditionals take the least upper bound
// under standard subtyping. Absent when no such type exists.
std::optional<LocalPtr> infer_process(const TypingEnv& env, const ProcessPtr& p);

// Checks p against t, discharging mismatches through one bounded
// asynchronous-subtyping query per mismatch point.
Verdict3 type_process(const TypingEnv& env, const ProcessPtr& p, const LocalPtr& t, int k);

Verdict3 type_session(const Session& m, const GlobalPtr& g, int k);

// ---------------------------------------------------------------------------
// Reduction

struct SessionStep {
  std::string rule;  // R-Send, R-Rcv, R-Cond-T, R-Cond-F, Err-Mism, Err-Eval
  Role subject;
  std::optional<Role> peer;
  std::optional<Label> label;
  bool is_error = false;
  Session next;  // empty when is_error
};

// One-step successors after precongruence normalization.
std::vector<SessionStep> session_step(const Session& m, uint64_t seed);

// Drops terminated role pairs (SC-Idle); recursion unfolds on demand.
Session precongruence_normalize(const Session& m);

struct RunResult {
  enum class Outcome { Ok, Err, Terminated };
  Outcome outcome = Outcome::Ok;
  std::vector<SessionStep> trace;
  size_t steps_taken = 0;
};

// Round-robin fair scheduler; every persistently enabled role acts within
// one round.
RunResult run_fair(const Session& m, size_t steps, uint64_t seed);

}  // namespace mpst

#endif  // MPST_PROCESS_HPP_
