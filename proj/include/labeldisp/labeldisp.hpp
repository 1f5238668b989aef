/* Copyright 2026 The labeldisp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include "labeldisp/analytics/histogram.hpp"
#include "labeldisp/analytics/report.hpp"
#include "labeldisp/core/digest.hpp"
#include "labeldisp/core/error.hpp"
#include "labeldisp/core/files.hpp"
#include "labeldisp/core/parallel.hpp"
#include "labeldisp/core/rng.hpp"
#include "labeldisp/embedding/emb1.hpp"
#include "labeldisp/embedding/embedding.hpp"
#include "labeldisp/embedding/ucf101.hpp"
#include "labeldisp/masking/image.hpp"
#include "labeldisp/masking/maskers.hpp"
#include "labeldisp/masking/png_io.hpp"
#include "labeldisp/noise/dictionary_io.hpp"
#include "labeldisp/noise/noise.hpp"
#include "labeldisp/noise/training.hpp"
#include "labeldisp/pipeline/manifest.hpp"
#include "labeldisp/pipeline/output.hpp"
#include "labeldisp/pipeline/provider.hpp"
#include "labeldisp/pipeline/run_config.hpp"
#include "labeldisp/pipeline/split.hpp"
#include "labeldisp/pipeline/tasks.hpp"
