#pragma once

// Umbrella header for the whole library.

#include "ime/bench.hpp"
#include "ime/common.hpp"
#include "ime/config.hpp"
#include "ime/dataset.hpp"
#include "ime/eval.hpp"
#include "ime/fingerprint.hpp"
#include "ime/graph.hpp"
#include "ime/layer.hpp"
#include "ime/pca.hpp"
#include "ime/pipeline.hpp"
#include "ime/similarity.hpp"
#include "ime/spectral.hpp"
#include "ime/synthetic.hpp"
