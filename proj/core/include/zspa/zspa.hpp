#pragma once

#include "zspa/emb_io.hpp"
#include "zspa/embedding.hpp"
#include "zspa/error.hpp"
#include "zspa/harness.hpp"
#include "zspa/pipeline.hpp"
#include "zspa/rng.hpp"
#include "zspa/selection.hpp"
