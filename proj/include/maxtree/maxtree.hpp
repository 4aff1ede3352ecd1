#pragma once

// Convenience include of the whole library.

#include "algorithms.hpp"
#include "attributes.hpp"
#include "bench.hpp"
#include "core.hpp"
#include "flooding.hpp"
#include "image.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "pixel_sort.hpp"
#include "transforms.hpp"
#include "tree.hpp"
#include "union_find.hpp"
