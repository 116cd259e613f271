//
// Copyright 2026 The user_dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef USER_DP_STATUS_MACROS_H_
#define USER_DP_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define USER_DP_CONCAT_INNER_(x, y) x##y
#define USER_DP_CONCAT_(x, y) USER_DP_CONCAT_INNER_(x, y)

#define USER_DP_RETURN_IF_ERROR(expr)    \
  do {                                   \
    const absl::Status _status = (expr); \
    if (!_status.ok()) return _status;   \
  } while (0)

#define USER_DP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                   \
  if (!tmp.ok()) return tmp.status();                   \
  lhs = std::move(tmp).value()

// Evaluates an absl::StatusOr expression, returning its status on error and
// otherwise moving the value into `lhs`.
#define USER_DP_ASSIGN_OR_RETURN(lhs, rexpr) \
  USER_DP_ASSIGN_OR_RETURN_IMPL_(            \
      USER_DP_CONCAT_(_status_or_, __LINE__), lhs, rexpr)

#endif  // USER_DP_STATUS_MACROS_H_
