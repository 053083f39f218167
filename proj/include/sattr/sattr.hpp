// Copyright 2026 The spectral-attr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.
#include "sattr/attribution.hpp"
#include "sattr/baseline.hpp"
#include "sattr/error.hpp"
#include "sattr/gating.hpp"
#include "sattr/io.hpp"
#include "sattr/metrics.hpp"
#include "sattr/model.hpp"
#include "sattr/path.hpp"
#include "sattr/random.hpp"
#include "sattr/report.hpp"
#include "sattr/selftest.hpp"
#include "sattr/spatial.hpp"
#include "sattr/spectrum.hpp"
#include "sattr/svd.hpp"
#include "sattr/tensor.hpp"
#include "sattr/text.hpp"
#include "sattr/transforms.hpp"
