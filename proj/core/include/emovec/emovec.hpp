// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "emovec/analysis.hpp"
#include "emovec/backend.hpp"
#include "emovec/corpus.hpp"
#include "emovec/dictionary.hpp"
#include "emovec/digest.hpp"
#include "emovec/errors.hpp"
#include "emovec/estimator.hpp"
#include "emovec/io.hpp"
#include "emovec/plot.hpp"
#include "emovec/remote_backend.hpp"
#include "emovec/toy_backend.hpp"
