// Copyright 2026 The rgnn Authors.
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

#ifndef RGNN_ERRORS_H_
#define RGNN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rgnn {

// Latent point outside the model's latent space.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model cannot support the requested operation (e.g. zero degree under the
// normalized Laplacian).
class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// alpha_n * w(x, y) leaves [0, 1].
class InvalidProbabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operand shapes do not chain.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rgnn

#endif  // RGNN_ERRORS_H_
