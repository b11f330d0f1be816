// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_JSON_IO_HPP_
#define MPST_JSON_IO_HPP_

#include <json.hpp>

#include "mpst/association.hpp"
#include "mpst/process.hpp"
#include "mpst/properties.hpp"
#include "mpst/wellformed.hpp"

namespace mpst {

nlohmann::json json_of(const ActionLabel& l);
nlohmann::json json_of(const QueueType& h);
nlohmann::json json_of(const TypingContext& ctx);
nlohmann::json json_of(const BalanceReport& r);
nlohmann::json json_of(const PropertyVerdict& v);
nlohmann::json json_of(const ProbeReport& r);
nlohmann::json json_of(Verdict3 v);
nlohmann::json json_of(const SessionStep& s);

}  // namespace mpst

#endif  // MPST_JSON_IO_HPP_
