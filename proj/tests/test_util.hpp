// Copyright 2026 The Policy Arena Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gtest/gtest.h>

#include <string>

#include "policy_arena/error.hpp"

namespace policy_arena::testing_util {

template <typename F>
void ExpectErrc(Errc expected, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(expected) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(to_string(e.code()), to_string(expected)) << e.what();
  }
}

}  // namespace policy_arena::testing_util
