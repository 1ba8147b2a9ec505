#pragma once

#include "kaczmarz/csv.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/noise_stats.hpp"
#include "kaczmarz/operator.hpp"
#include "kaczmarz/problem_io.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/solvers.hpp"
#include "kaczmarz/spectral.hpp"
