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

// Convenience header pulling in the whole library.

#ifndef USER_DP_USER_DP_H_
#define USER_DP_USER_DP_H_

#include "user_dp/audit.h"
#include "user_dp/calculus.h"
#include "user_dp/combinatorics.h"
#include "user_dp/core.h"
#include "user_dp/delstab.h"
#include "user_dp/em.h"
#include "user_dp/experiment.h"
#include "user_dp/io.h"
#include "user_dp/learners.h"
#include "user_dp/mechanism.h"
#include "user_dp/mechanisms.h"
#include "user_dp/noise.h"
#include "user_dp/random.h"
#include "user_dp/status_macros.h"

#endif  // USER_DP_USER_DP_H_
