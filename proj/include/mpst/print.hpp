// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_PRINT_HPP_
#define MPST_PRINT_HPP_

#include <string>

#include "mpst/core.hpp"
#include "mpst/process.hpp"
#include "mpst/semantics.hpp"

namespace mpst {

// Canonical DSL text; parsing the output reproduces the AST.
std::string print_global(const GlobalPtr& g);
std::string print_local(const LocalPtr& t);
std::string print_queue(const QueueType& h);
std::string print_context(const TypingContext& ctx);
std::string print_process(const ProcessPtr& p);
std::string print_expr(const ExprPtr& e);
std::string print_value(const Value& v);
std::string print_session(const Session& m);

}  // namespace mpst

#endif  // MPST_PRINT_HPP_
