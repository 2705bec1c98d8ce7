// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
//
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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace protfit {

/// One `key=value` per line; '#' starts a comment; blank lines ignored.
/// Keys keep their file order. Malformed lines throw ParseError.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    std::string_view text, const std::string& source);

bool parse_bool(std::string_view value, const std::string& context);

}  // namespace protfit
