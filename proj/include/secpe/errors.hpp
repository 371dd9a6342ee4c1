// Copyright 2026 The SecPE Authors
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

#ifndef SECPE_ERRORS_HPP
#define SECPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace secpe {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError -> 2, IoError -> 1, BackendError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments, malformed configs, domain errors, infeasible budgets.
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem and file-format failures.
struct IoError : Error {
  using Error::Error;
};

// Generator/embedder backend failures; carries the pipeline round when known.
struct BackendError : Error {
  explicit BackendError(const std::string& what, int round = -1)
      : Error(what), round(round) {}
  int round;
};

// p >= r for some secret: no noise scale can satisfy the budget.
struct VacuousBudgetError : ValidationError {
  explicit VacuousBudgetError(const std::string& what, std::string secret = {})
      : ValidationError(what), secret_id(std::move(secret)) {}
  std::string secret_id;
};

}  // namespace secpe

#endif  // SECPE_ERRORS_HPP
