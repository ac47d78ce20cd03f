//
// Copyright 2026 The dpfl Authors
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

#ifndef DPFL_LOG_HPP_
#define DPFL_LOG_HPP_

namespace dpfl {

// Environment variable holding the log level: trace, debug, info, warn, error,
// critical or off. Defaults to warn.
inline constexpr const char* kLogLevelEnv = "DPFL_LOG_LEVEL";

// Applies kLogLevelEnv to the default stderr logger.
void configure_logging_from_env();

}  // namespace dpfl

#endif  // DPFL_LOG_HPP_
