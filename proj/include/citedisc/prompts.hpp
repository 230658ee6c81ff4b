// Copyright 2026 The citedisc Authors.
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

namespace citedisc {

struct PromptTemplate {
  std::string_view name;
  std::string_view text;
};

const PromptTemplate& relation_extraction_template();
const PromptTemplate& citation_selection_template();

// Replaces `{key}` placeholders in one pass; substituted text is never
// rescanned. Unknown placeholders are left as is.
std::string fill_template(
    std::string_view text,
    const std::vector<std::pair<std::string_view, std::string_view>>& values);

}  // namespace citedisc
