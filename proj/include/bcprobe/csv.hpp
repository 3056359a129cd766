// Copyright 2026 The bcprobe Authors.
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

// RFC 4180 CSV output with CRLF row endings.

#ifndef BCPROBE_CSV_HPP_
#define BCPROBE_CSV_HPP_

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bcprobe::csv {

std::string Escape(std::string_view field);
void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

// Shortest representation that round-trips the double.
std::string Number(double v);

}  // namespace bcprobe::csv

#endif  // BCPROBE_CSV_HPP_
