// Copyright 2026 The imlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef IMLAB_ERRORS_HPP
#define IMLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace imlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid polygon input or an offset that cannot be represented.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Point outside the domain of a metric or map.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Boundary integral system too badly conditioned to trust.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Certified lower bound exceeds certified upper bound beyond slack.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Domain sequence does not settle between I_k and E_k within the search cap.
class SequenceError : public Error {
 public:
  SequenceError(const std::string& what, int witness_index)
      : Error(what), witness_index_(witness_index) {}
  int witness_index() const { return witness_index_; }

 private:
  int witness_index_;
};

// Sandwich construction could not find an admissible intermediate domain.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Sequence generator could not produce valid domains.
class GeneratorError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration violates a hypothesis of the convergence theorem.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or exchange file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace imlab

#endif  // IMLAB_ERRORS_HPP
