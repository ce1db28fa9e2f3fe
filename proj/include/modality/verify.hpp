// Copyright 2026 The Modality Engine Authors
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

// Randomized property suites over the probability and reconstruction layers.
// Each suite returns one Report per dimension (or per check) and is fully
// determined by its arguments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modality/contexts.hpp"
#include "modality/report.hpp"

namespace modality {

/// Context built from a Haar-random unitary.
Context random_context(Eigen::Index dim, std::uint64_t seed);

/// A Haar-random base context followed by `count - 1` contexts that each keep
/// a random subset of earlier projectors and rotate the rest within their
/// span; some members are reorderings of earlier ones. Cross-context pairs
/// therefore include exclusive, certain and probabilistic ones.
std::vector<Context> shared_projector_family(Eigen::Index dim, int count,
                                             std::uint64_t seed);

std::vector<Report> verify_unistochastic(const std::vector<int>& dims, int samples,
                                         std::uint64_t seed);
std::vector<Report> verify_gleason(const std::vector<int>& dims, int samples,
                                   std::uint64_t seed);
std::vector<Report> verify_counterexample(int samples, std::uint64_t seed);
std::vector<Report> verify_permutation(const std::vector<int>& dims);
std::vector<Report> verify_extravalence(const std::vector<int>& dims, int samples,
                                        std::uint64_t seed);
std::vector<Report> verify_super_context(const std::vector<int>& dims, int samples,
                                         std::uint64_t seed);

std::vector<std::string> available_suites();

/// Runs a suite by name with its default dims/samples where not given.
/// Throws InvalidArgument for an unknown suite.
std::vector<Report> run_suite(const std::string& suite,
                              const std::optional<std::vector<int>>& dims,
                              const std::optional<int>& samples, std::uint64_t seed);

}  // namespace modality
