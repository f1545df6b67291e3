#pragma once

#include "dfe/classifier.hpp"
#include "dfe/divergence.hpp"
#include "dfe/embedding.hpp"
#include "dfe/frontier.hpp"
#include "dfe/generator.hpp"
#include "dfe/histogram.hpp"
#include "dfe/io.hpp"
#include "dfe/kmeans.hpp"
#include "dfe/knn.hpp"
#include "dfe/ot.hpp"
#include "dfe/parametric.hpp"
#include "dfe/quantization.hpp"
#include "dfe/random.hpp"
#include "dfe/simulation.hpp"
