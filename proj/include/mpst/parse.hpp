// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_PARSE_HPP_
#define MPST_PARSE_HPP_

#include <map>
#include <stdexcept>
#include <string>

#include "mpst/core.hpp"
#include "mpst/process.hpp"
#include "mpst/semantics.hpp"

namespace mpst {

struct ParseError : std::runtime_error {
  SourceSpan span;
  ParseError(const std::string& msg, SourceSpan sp)
      : std::runtime_error(msg), span(std::move(sp)) {}
};

// Concrete syntax (ASCII): `->` transmission, `~>` en-route, `(+)` select,
// `&` branch, `rec x .` binder, `{ , }` choices; an omitted payload reads as
// `(unit)`. Parsers validate binding, guardedness, label distinctness and
// self-communication, reporting offending spans.

GlobalPtr parse_global(const std::string& src, const std::string& file = "<input>");
LocalPtr parse_local(const std::string& src, const std::string& file = "<input>");
QueueType parse_queue(const std::string& src, const std::string& file = "<input>");
TypingContext parse_context(const std::string& src, const std::string& file = "<input>");
ProcessPtr parse_process(const std::string& src, const std::string& file = "<input>");

// A manifest bundles a protocol with role processes and optional runtime
// queues:
//
//   global { rec t . p -> q { add(int) . ... } }
//   role p = rec X . q!add<7> . sum { r?add(x: int).X, r?sub(x: int).X }
//   queue p = <q, add(7)>
struct Manifest {
  GlobalPtr global;
  Session session;
};

Manifest parse_manifest(const std::string& src, const std::string& file = "<input>");

}  // namespace mpst

#endif  // MPST_PARSE_HPP_
